"""Search outcomes returned by the engines.

Every engine answers with exactly one of:

* ``StableSetCert``   - a stable set together with the bound it was claimed to meet;
* ``TreeWitness``     - an induced copy of the forbidden tree;
* ``HypothesisViolation`` - a clique larger than the asserted clique bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union


def _frac_str(x: Fraction | None):
    return None if x is None else str(Fraction(x))


@dataclass(frozen=True)
class StableSetCert:
    vertices: tuple[int, ...]
    claimed_bound: Fraction
    mode: str
    # Weighted certificates carry w(S), w(G) and the constant c with w(S) >= c w(G).
    weight: Fraction | None = None
    total_weight: Fraction | None = None
    constant: Fraction | None = None
    details: dict = field(default_factory=dict, compare=False)

    kind = "stable"

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def required_size(self) -> int:
        if self.claimed_bound > 0:
            return math.ceil(self.claimed_bound)
        return 0

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "mode": self.mode,
            "vertices": list(self.vertices),
            "size": self.size,
            "claimed_bound": _frac_str(self.claimed_bound),
        }
        if self.constant is not None:
            out["weight"] = _frac_str(self.weight)
            out["total_weight"] = _frac_str(self.total_weight)
            out["constant"] = _frac_str(self.constant)
        if self.details:
            out["details"] = self.details
        return out


@dataclass(frozen=True)
class TreeWitness:
    """``embedding[i]`` is the host vertex playing tree vertex ``i``."""

    embedding: tuple[int, ...]

    kind = "witness"

    def to_json(self) -> dict:
        return {"kind": self.kind, "embedding": list(self.embedding)}


@dataclass(frozen=True)
class HypothesisViolation:
    clique: tuple[int, ...]

    kind = "violation"

    def to_json(self) -> dict:
        return {"kind": self.kind, "clique": list(self.clique)}


SearchOutcome = Union[StableSetCert, TreeWitness, HypothesisViolation]


def outcome_from_json(data: dict) -> SearchOutcome:
    kind = data["kind"]
    if kind == "witness":
        return TreeWitness(tuple(data["embedding"]))
    if kind == "violation":
        return HypothesisViolation(tuple(data["clique"]))
    if kind == "stable":
        opt = lambda key: None if data.get(key) is None else Fraction(data[key])
        return StableSetCert(
            tuple(data["vertices"]), Fraction(data["claimed_bound"]), data["mode"],
            opt("weight"), opt("total_weight"), opt("constant"), data.get("details", {}),
        )
    raise ValueError(f"unknown outcome kind {kind!r}")
