"""Batch runner: instances x patterns x clique bounds x engines, every outcome validated.

Config (JSON object)::

    {"items": [{"instance": "cycle:n=7", "tree": "path:4", "k": 2,
                "engine": "sparse", "mode": "default", "weights": "uniform"}],
     "grid": {"instances": [...], "trees": [...], "ks": [...],
              "engines": [...], "modes": [...]},
     "workers": 1}

``grid`` expands in the listed nesting order and is appended after
``items``.  Reports are one JSON object per line, sorted keys, followed by a
summary object; they contain no timings so reruns are byte-identical.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache
from typing import IO, Iterable

from .errors import OracleLimitError, ParameterError
from .generators import generate, parse_instance
from .multibroom import multibroom_pattern, weighted_stable_multibroom
from .outcomes import StableSetCert, outcome_from_json
from .prng import XorShift64Star
from .sparsify import forced_y, stable_set_sparse
from .trees import parse_pattern
from .witness import ALPHA_LIMIT, exact_alpha, exact_omega, validate_outcome

ENGINES = ("sparse", "multibroom")
MODES = ("default", "force")


def expand_config(config: dict) -> list[dict]:
    items = [dict(it) for it in config.get("items", [])]
    grid = config.get("grid")
    if grid:
        for inst, tree, k, engine, mode in itertools.product(
                grid["instances"], grid["trees"], grid["ks"],
                grid.get("engines", ["sparse"]), grid.get("modes", ["default"])):
            if engine == "multibroom" and mode != "default":
                continue  # force mode only tunes the sparse engine
            items.append({"instance": inst, "tree": tree, "k": k, "engine": engine, "mode": mode})
    for it in items:
        it.setdefault("engine", "sparse")
        it.setdefault("mode", "default")
        it.setdefault("weights", "uniform")
        if it["engine"] not in ENGINES:
            raise ParameterError(f"unknown engine {it['engine']!r}")
        if it["mode"] not in MODES:
            raise ParameterError(f"unknown mode {it['mode']!r}")
    return items


@lru_cache(maxsize=256)
def _instance(key: str):
    spec = parse_instance(json.loads(key))
    G = generate(spec)
    alpha = omega = None
    if G.n <= ALPHA_LIMIT:
        try:
            alpha = exact_alpha(G)[0]
            omega = exact_omega(G)
        except OracleLimitError:
            pass
    return spec, G, alpha, omega


def _weights(item: dict, G, seed: int):
    spec = item.get("weights", "uniform")
    if spec == "uniform":
        return None
    if spec == "random":
        rng = XorShift64Star(seed)
        return [Fraction(rng.randint(1, 8), rng.randint(1, 4)) for _ in range(G.n)]
    return [Fraction(x) for x in spec]


def run_item(index: int, item: dict) -> dict:
    inst = parse_instance(item["instance"])
    spec, G, alpha, omega = _instance(json.dumps(inst.to_json(), sort_keys=True))
    T = parse_pattern(item["tree"])
    k = int(item["k"])
    report = {"index": index, "instance": spec.to_json(), "n": G.n, "edges": G.edge_count,
              "tree": str(T), "k": k, "engine": item["engine"], "mode": item["mode"],
              "alpha": alpha, "omega": omega}
    weights = None
    try:
        if item["engine"] == "sparse":
            y = forced_y(T, k) if item["mode"] == "force" else None
            out = stable_set_sparse(G, T, k, y=y, audit=item["mode"] == "force")
            pattern = T
        else:
            weights = _weights(item, G, spec.seed + index)
            out = weighted_stable_multibroom(G, weights, T, k)
            pattern = multibroom_pattern(T)
    except (ParameterError, AssertionError) as exc:
        report.update(kind="error", valid=False, messages=[f"{type(exc).__name__}: {exc}"])
        return report
    # Validate what a reader of the report would load, not the live object.
    data = json.loads(json.dumps(out.to_json()))
    loaded = outcome_from_json(data)
    check = validate_outcome(G, pattern, k, loaded, weights=weights or [1] * G.n, check_omega=False)
    msgs = list(check.messages)
    if omega is not None and omega > k and loaded.kind != "violation":
        msgs.append(f"note: ω(G)={omega} exceeds k={k}")
    report.update(kind=loaded.kind, valid=check.ok and loaded == out, outcome=data, messages=msgs)
    if isinstance(loaded, StableSetCert):
        report["size"] = loaded.size
        report["claimed_bound"] = str(loaded.claimed_bound)
        if alpha:
            report["size_over_alpha"] = str(Fraction(loaded.size, alpha))
    return report


def _run_pair(args):
    return run_item(*args)


def run_batch(config: dict, workers: int | None = None) -> tuple[list[dict], dict]:
    items = expand_config(config)
    workers = workers or int(config.get("workers", 1))
    jobs = list(enumerate(items))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_pair, jobs, chunksize=8))
    else:
        reports = [run_item(i, it) for i, it in jobs]
    return reports, summarize(reports)


def summarize(reports: Iterable[dict]) -> dict:
    reports = list(reports)
    kinds: dict[str, int] = {}
    ratios = []
    for r in reports:
        key = f"{r['engine']}/{r['kind']}"
        kinds[key] = kinds.get(key, 0) + 1
        if "size_over_alpha" in r:
            ratios.append(Fraction(r["size_over_alpha"]))
    failures = [r["index"] for r in reports if not r["valid"]]
    return {
        "summary": True,
        "items": len(reports),
        "valid": len(reports) - len(failures),
        "failures": failures,
        "outcomes": dict(sorted(kinds.items())),
        "mean_size_over_alpha": str(sum(ratios) / len(ratios)) if ratios else None,
        "min_size_over_alpha": str(min(ratios)) if ratios else None,
        "ok": not failures,
    }


def write_reports(fh: IO[str], reports: list[dict], summary: dict) -> None:
    for r in reports:
        fh.write(json.dumps(r, sort_keys=True) + "\n")
    fh.write(json.dumps(summary, sort_keys=True) + "\n")


def format_summary(summary: dict) -> str:
    lines = [f"items {summary['items']}  valid {summary['valid']}  failures {len(summary['failures'])}"]
    for key, count in summary["outcomes"].items():
        lines.append(f"  {key:<24} {count}")
    if summary["mean_size_over_alpha"] is not None:
        mean = Fraction(summary["mean_size_over_alpha"])
        low = Fraction(summary["min_size_over_alpha"])
        lines.append(f"  size/alpha mean {float(mean):.3f}  min {float(low):.3f}")
    return "\n".join(lines)
