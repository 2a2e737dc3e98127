"""Explicit (a, b)-fractional colourings from repeated weighted stable sets.

Each round reweights every vertex by 2^-cover(v), asks the multibroom engine
for a heavy stable set and bumps the cover of its vertices.  Heavily covered
vertices stop mattering, so later rounds favour the laggards.  Soundness of
the family never depends on this schedule; only the ratio a/b does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import Graph, is_stable, members, vset
from .multibroom import MultibroomSpec, multibroom_constant, weighted_stable_multibroom, _spec_of
from .outcomes import HypothesisViolation, StableSetCert, TreeWitness
from .trees import TreePattern
from .witness import FRAC_LIMIT, exact_frac_chromatic


@dataclass
class FracColouring:
    sets: list[tuple[int, ...]]
    cover: list[int]
    potentials: list[Fraction] = field(default_factory=list)
    constant: Fraction | None = None      # engine constant c; theory gives chi* <= 1/c

    @property
    def a(self) -> int:
        return len(self.sets)

    @property
    def b(self) -> int:
        return min(self.cover) if self.cover else self.a

    @property
    def ratio(self) -> Fraction | None:
        return Fraction(self.a, self.b) if self.b else None

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "sets": [list(s) for s in self.sets]}

    def report(self) -> dict:
        out = self.to_json()
        out["ratio"] = None if self.ratio is None else str(self.ratio)
        if self.constant is not None:
            out["theoretical_bound"] = str(1 / self.constant)
        return out


def colouring_from_json(data: dict, n: int) -> FracColouring:
    sets = [tuple(s) for s in data["sets"]]
    cover = [0] * n
    for s in sets:
        for v in s:
            cover[v] += 1
    return FracColouring(sets, cover)


def build_frac_colouring(G: Graph, T: TreePattern | MultibroomSpec, k: int, rounds: int,
                         audit: bool = True):
    """Run ``rounds`` reweighting rounds; returns a ``FracColouring`` or the engine's
    ``TreeWitness`` / ``HypothesisViolation`` from the first round that produced one."""
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    spec = _spec_of(T)
    cover = [0] * G.n
    sets: list[tuple[int, ...]] = []
    potentials = [Fraction(G.n)]
    for _ in range(rounds):
        w = [Fraction(1, 2 ** c) for c in cover]
        out = weighted_stable_multibroom(G, w, spec, k, audit=audit)
        if not isinstance(out, StableSetCert):
            return out
        for v in out.vertices:
            cover[v] += 1
        sets.append(out.vertices)
        phi = sum((Fraction(1, 2 ** c) for c in cover), Fraction(0))
        # Covered vertices halve their weight, so the potential drops by w(S)/2.
        if phi != potentials[-1] - out.weight / 2:
            raise AssertionError("potential bookkeeping mismatch")
        potentials.append(phi)
    return FracColouring(sets, cover, potentials, multibroom_constant(spec, k))


@dataclass
class FracCheck:
    ok: bool
    ratio: Fraction | None
    messages: list[str]
    chi_star: Fraction | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "ratio": None if self.ratio is None else str(self.ratio),
                "chi_star": None if self.chi_star is None else str(self.chi_star),
                "messages": self.messages}


def verify_frac_colouring(G: Graph, fc: FracColouring, use_oracle: bool = True) -> FracCheck:
    """Recheck stability and cover counts from scratch; compare a/b with χ* when small."""
    msgs = []
    cover = [0] * G.n
    for i, s in enumerate(fc.sets):
        if any(not 0 <= v < G.n for v in s) or len(set(s)) != len(s):
            msgs.append(f"set {i} has invalid vertices")
            continue
        if not is_stable(G, vset(s)):
            msgs.append(f"set {i} is not stable")
        for v in s:
            cover[v] += 1
    if cover != list(fc.cover):
        msgs.append("stored cover counts do not match the sets")
    if not fc.sets:
        msgs.append("empty family")
    b = min(cover) if cover else len(fc.sets)
    if b < 1:
        msgs.append("some vertex is never covered (b = 0)")
    ratio = Fraction(len(fc.sets), b) if b >= 1 else None
    chi = None
    if use_oracle and ratio is not None and G.n <= FRAC_LIMIT:
        chi = exact_frac_chromatic(G)
        if ratio < chi:
            msgs.append(f"a/b = {ratio} below the fractional chromatic number {chi}")
    return FracCheck(not msgs, ratio, msgs, chi)


def empirical_contraction(fc: FracColouring) -> float:
    """Mean per-round factor 1 - Phi_{t+1}/Phi_t observed while building ``fc``."""
    steps = [1 - float(b / a) for a, b in zip(fc.potentials, fc.potentials[1:]) if a]
    return sum(steps) / len(steps) if steps else 0.0


def suggest_rounds(n: int, b_target: int, contraction: float) -> int:
    """Heuristic round count for reaching cover ``b_target``; not a guarantee.

    Uses ceil((b_target + log2 n) * 2 ln 2 / contraction) with the
    contraction measured by ``empirical_contraction`` on a pilot run.
    """
    if contraction <= 0:
        raise ValueError("contraction must be positive")
    return math.ceil((b_target + math.log2(max(n, 1))) * 2 * math.log(2) / contraction)
