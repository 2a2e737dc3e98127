"""Command-line entry point.

Exit codes: 0 every outcome validated, 1 a validation failure, 2 usage or
input error.  A GRAPH argument is a file (DIMACS, or JSON with --format json)
or, when no such file exists, a generator spec such as ``kneser:n=5,k=2``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .batch import format_summary, run_batch, write_reports
from .dimacs import format_dimacs, graph_from_json, graph_to_json, read_dimacs
from .errors import GraphError, OracleLimitError, ParameterError
from .fraccolour import build_frac_colouring, verify_frac_colouring
from .generators import generate, parse_instance
from .multibroom import multibroom_pattern, weighted_stable_multibroom
from .outcomes import StableSetCert
from .sparsify import forced_y, stable_set_sparse
from .trees import parse_pattern
from .witness import exact_alpha, exact_frac_chromatic, exact_omega, find_induced_tree, validate_outcome


class UsageError(Exception):
    pass


def _load_graph(arg: str, fmt: str, seed: int | None):
    if os.path.exists(arg):
        if fmt == "json":
            with open(arg) as fh:
                return graph_from_json(json.load(fh))
        return read_dimacs(arg)
    return generate(parse_instance(arg, seed=seed))


def _emit(obj, out=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _weights(arg: str | None, n: int):
    if arg is None:
        return None
    if os.path.exists(arg):
        with open(arg) as fh:
            data = json.load(fh)
    else:
        try:
            data = json.loads(arg)
        except json.JSONDecodeError:
            raise UsageError(f"--weights is neither a file nor a JSON list: {arg!r}") from None
    if not isinstance(data, list) or len(data) != n:
        raise UsageError(f"weights need a list of {n} entries")
    return [Fraction(str(x)) for x in data]


def cmd_gen(args) -> int:
    spec = parse_instance(args.spec, seed=args.seed)
    G = generate(spec)
    if args.format == "json":
        data = graph_to_json(G)
        data["instance"] = spec.to_json()
        text = json.dumps(data, sort_keys=True) + "\n"
    else:
        text = format_dimacs(G, comment=str(spec))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_check_free(args) -> int:
    G = _load_graph(args.graph, args.format, args.seed)
    T = parse_pattern(args.tree)
    wit = find_induced_tree(G, T)
    _emit({"tree": str(T), "free": wit is None, "witness": None if wit is None else wit.to_json()})
    return 0


def cmd_stable(args) -> int:
    G = _load_graph(args.graph, args.format, args.seed)
    T = parse_pattern(args.tree)
    weights = None
    if args.engine == "sparse":
        if args.weights:
            raise UsageError("--weights applies to the multibroom engine only")
        y = forced_y(T, args.k) if args.force_sparsify else None
        out = stable_set_sparse(G, T, args.k, y=y, audit=args.force_sparsify)
        pattern = T
    else:
        weights = _weights(args.weights, G.n)
        out = weighted_stable_multibroom(G, weights, T, args.k)
        pattern = multibroom_pattern(T)
    check = validate_outcome(G, pattern, args.k, out, weights=weights or [1] * G.n,
                             check_omega=G.n <= 60)
    _emit({"outcome": out.to_json(), "validation": check.to_json()}, args.output)
    return 0 if check.ok else 1


def cmd_frac(args) -> int:
    G = _load_graph(args.graph, args.format, args.seed)
    T = parse_pattern(args.tree)
    fc = build_frac_colouring(G, T, args.k, args.rounds)
    if not hasattr(fc, "sets"):
        _emit({"outcome": fc.to_json()}, args.output)
        return 0
    check = verify_frac_colouring(G, fc, use_oracle=not args.no_oracle)
    _emit({"colouring": fc.report(), "verification": check.to_json()}, args.output)
    return 0 if check.ok else 1


def cmd_oracle(args) -> int:
    G = _load_graph(args.graph, args.format, args.seed)
    res = {"n": G.n, "edges": G.edge_count}
    what = set(args.what)
    if "alpha" in what:
        size, mask = exact_alpha(G)
        res["alpha"] = size
        res["stable_set"] = [v for v in range(G.n) if mask >> v & 1]
    if "omega" in what:
        res["omega"] = exact_omega(G)
    if "chi" in what:
        res["fractional_chromatic"] = str(exact_frac_chromatic(G))
    _emit(res, args.output)
    return 0


def cmd_bench(args) -> int:
    with open(args.config) as fh:
        config = json.load(fh)
    reports, summary = run_batch(config, workers=args.workers)
    if args.output:
        with open(args.output, "w") as fh:
            write_reports(fh, reports, summary)
    else:
        write_reports(sys.stdout, reports, summary)
    print(format_summary(summary), file=sys.stderr)
    return 0 if summary["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("dimacs", "json"), default="dimacs")
    common.add_argument("--seed", type=int, default=None, help="seed for random generators (u64)")
    common.add_argument("-o", "--output", default=None)

    tree = argparse.ArgumentParser(add_help=False)
    tree.add_argument("--tree", required=True, help="broom:L,M | multibroom:(L,M),... | path:N | star:N")
    tree.add_argument("--k", type=int, required=True, help="clique number bound")

    p = argparse.ArgumentParser(prog="treefree", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate an instance")
    g.add_argument("spec")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check-free", parents=[common], help="search for an induced copy of a tree")
    c.add_argument("graph")
    c.add_argument("--tree", required=True)
    c.set_defaults(func=cmd_check_free)

    s = sub.add_parser("stable", parents=[common, tree], help="run a stable-set engine")
    s.add_argument("graph")
    s.add_argument("--engine", choices=("sparse", "multibroom"), default="sparse")
    s.add_argument("--force-sparsify", action="store_true",
                   help="run the iterated engine with forced ratios instead of the closed form")
    s.add_argument("--weights", default=None, help="file or inline JSON list of vertex weights (multibroom engine)")
    s.set_defaults(func=cmd_stable)

    f = sub.add_parser("frac", parents=[common, tree], help="build a fractional colouring")
    f.add_argument("graph")
    f.add_argument("--rounds", type=int, default=64)
    f.add_argument("--no-oracle", action="store_true")
    f.set_defaults(func=cmd_frac)

    o = sub.add_parser("oracle", parents=[common], help="exact alpha / omega / fractional chromatic number")
    o.add_argument("graph")
    o.add_argument("--what", nargs="+", choices=("alpha", "omega", "chi"), default=["alpha", "omega"])
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="run a batch config, write JSON lines")
    b.add_argument("config")
    b.add_argument("-o", "--output", default=None)
    b.add_argument("--workers", type=int, default=None)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GraphError, ParameterError, OracleLimitError, ValueError, OSError) as exc:
        print(f"treefree: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
