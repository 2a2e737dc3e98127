"""DIMACS edge format: ``p edge n m`` header, ``e u v`` lines, 1-based vertices."""

from __future__ import annotations

from typing import IO, Iterable

from .errors import GraphError
from .graph import Graph, build_graph


def parse_dimacs(lines: Iterable[str]) -> Graph:
    n = None
    declared = None
    edges = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise GraphError(f"line {lineno}: bad header {line!r}")
            n, declared = int(parts[2]), int(parts[3])
        elif parts[0] == "e":
            if n is None:
                raise GraphError(f"line {lineno}: edge before header")
            if len(parts) != 3:
                raise GraphError(f"line {lineno}: bad edge line {line!r}")
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
        else:
            raise GraphError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise GraphError("missing 'p edge' header")
    if declared is not None and declared != len(edges):
        # Duplicates are tolerated; only a short file is an error.
        if len(edges) < declared:
            raise GraphError(f"header declares {declared} edges, found {len(edges)}")
    return build_graph(n, edges)


def read_dimacs(path) -> Graph:
    with open(path) as fh:
        return parse_dimacs(fh)


def format_dimacs(G: Graph, comment: str | None = None) -> str:
    out = []
    if comment:
        out.extend(f"c {line}" for line in comment.splitlines())
    out.append(f"p edge {G.n} {G.edge_count}")
    out.extend(f"e {u + 1} {v + 1}" for u, v in G.edges())
    return "\n".join(out) + "\n"


def write_dimacs(G: Graph, fh: IO[str], comment: str | None = None) -> None:
    fh.write(format_dimacs(G, comment))


def graph_to_json(G: Graph) -> dict:
    return {"n": G.n, "edges": [list(e) for e in G.edges()]}


def graph_from_json(data: dict) -> Graph:
    try:
        return build_graph(int(data["n"]), [tuple(e) for e in data["edges"]])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GraphError):
            raise
        raise GraphError(f"bad JSON graph: {exc}") from None
