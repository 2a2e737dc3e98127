"""Deterministic instance generators.

An instance is named by ``InstanceSpec``: a generator name, its integer or
rational parameters, and a seed for the random ones.  The text form is
``name:key=value,key=value`` (for example ``random_gnp:n=30,p=1/10,seed=7``).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import GraphError
from .graph import Graph, build_graph
from .prng import XorShift64Star


@dataclass(frozen=True)
class InstanceSpec:
    generator: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def to_json(self) -> dict:
        out = {"generator": self.generator}
        out.update({k: _param_json(v) for k, v in sorted(self.params.items())})
        if self.generator in RANDOM_GENERATORS:
            out["seed"] = self.seed
        return out

    def __str__(self) -> str:
        parts = [f"{k}={v}" for k, v in sorted(self.params.items())]
        if self.generator in RANDOM_GENERATORS:
            parts.append(f"seed={self.seed}")
        return f"{self.generator}:{','.join(parts)}"


def _param_json(v):
    return str(v) if isinstance(v, Fraction) else v


def _coerce(v):
    if isinstance(v, (int, Fraction)):
        return v
    if isinstance(v, float):
        return Fraction(str(v))
    text = str(v).strip()
    try:
        return int(text)
    except ValueError:
        return Fraction(text)


def parse_instance(text_or_dict, seed: int | None = None) -> InstanceSpec:
    """Build an ``InstanceSpec`` from its text form or a JSON object."""
    if isinstance(text_or_dict, InstanceSpec):
        return text_or_dict
    if isinstance(text_or_dict, dict):
        data = dict(text_or_dict)
        name = data.pop("generator")
    else:
        name, _, body = str(text_or_dict).partition(":")
        data = {}
        for item in filter(None, (x.strip() for x in body.split(","))):
            key, eq, val = item.partition("=")
            if not eq:
                raise GraphError(f"bad generator parameter {item!r}")
            data[key.strip()] = val
    name = name.strip()
    if name not in GENERATORS:
        raise GraphError(f"unknown generator {name!r}")
    spec_seed = data.pop("seed", None)
    if seed is not None and spec_seed is None:
        spec_seed = seed
    try:
        params = {k: _coerce(v) for k, v in data.items()}
    except (ValueError, ZeroDivisionError):
        raise GraphError(f"bad parameters for {name}: {data}") from None
    return InstanceSpec(name, params, int(spec_seed or 0))


def generate(spec: InstanceSpec | str | dict) -> Graph:
    spec = parse_instance(spec)
    fn = GENERATORS[spec.generator]
    try:
        if spec.generator in RANDOM_GENERATORS:
            return fn(**spec.params, seed=spec.seed)
        return fn(**spec.params)
    except TypeError as exc:
        raise GraphError(f"bad parameters for {spec.generator}: {exc}") from None


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise GraphError(msg)


def cycle(n: int) -> Graph:
    _need(n >= 3, "cycle needs n >= 3")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    _need(n >= 1, "path needs n >= 1")
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def matching(n: int) -> Graph:
    """Perfect matching on ``n`` vertices: edges {2i, 2i+1}."""
    _need(n >= 0 and n % 2 == 0, "matching needs an even number of vertices")
    return build_graph(n, [(2 * i, 2 * i + 1) for i in range(n // 2)])


def complete(n: int) -> Graph:
    _need(n >= 0, "complete needs n >= 0")
    return build_graph(n, itertools.combinations(range(n), 2))


def empty(n: int) -> Graph:
    _need(n >= 0, "empty needs n >= 0")
    return build_graph(n, [])


def kneser(n: int, k: int) -> Graph:
    """k-subsets of {0..n-1} in ``itertools.combinations`` order; disjoint sets adjacent."""
    _need(n >= 1 and 1 <= k <= n, "kneser needs 1 <= k <= n")
    subsets = [frozenset(s) for s in itertools.combinations(range(n), k)]
    edges = [(i, j) for i, j in itertools.combinations(range(len(subsets)), 2)
             if not subsets[i] & subsets[j]]
    return build_graph(len(subsets), edges)


def mycielskian(G: Graph) -> Graph:
    """Copies u_i = n+i of each v_i (joined to N(v_i)) plus an apex 2n joined to every u_i."""
    n = G.n
    edges = list(G.edges())
    for u, v in G.edges():
        edges.append((u, n + v))
        edges.append((v, n + u))
    edges.extend((n + i, 2 * n) for i in range(n))
    return build_graph(2 * n + 1, edges)


def mycielski(depth: int) -> Graph:
    """depth 1 is K2; each further level applies the Mycielskian (depth 2 is C5)."""
    _need(depth >= 1, "mycielski needs depth >= 1")
    G = complete(2)
    for _ in range(depth - 1):
        G = mycielskian(G)
    return G


def random_gnp(n: int, p, seed: int = 0) -> Graph:
    _need(n >= 0 and 0 <= Fraction(p) <= 1, "random_gnp needs n >= 0 and 0 <= p <= 1")
    rng = XorShift64Star(seed)
    pairs = list(itertools.combinations(range(n), 2))
    return build_graph(n, list(itertools.compress(pairs, rng.bernoulli_many(p, len(pairs)))))


def random_girth(n: int, target_degree, g: int, seed: int = 0) -> Graph:
    """G(n, p) with p = target_degree/(n-1), then edges on cycles shorter than g removed.

    Edges are visited once in a seeded random order; an edge is dropped when
    its ends are joined by a path of length < g-1 in the rest of the graph.
    Deletions only lengthen distances, so one pass leaves girth >= g.
    """
    _need(n >= 2 and g >= 3, "random_girth needs n >= 2 and g >= 3")
    p = min(Fraction(target_degree) / (n - 1), Fraction(1))
    _need(p >= 0, "target degree must be nonnegative")
    rng = XorShift64Star(seed)
    pairs = list(itertools.combinations(range(n), 2))
    edges = list(itertools.compress(pairs, rng.bernoulli_many(p, len(pairs))))
    rng.shuffle(edges)
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    for u, v in edges:
        adj[u].discard(v)
        adj[v].discard(u)
        if _distance(adj, u, v, g - 2) > g - 2:
            adj[u].add(v)
            adj[v].add(u)
    return build_graph(n, [(u, v) for u in range(n) for v in adj[u] if u < v])


def _distance(adj, s: int, t: int, cutoff: int) -> int:
    """BFS distance from s to t, or cutoff+1 when larger than ``cutoff``."""
    dist = {s: 0}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if dist[u] >= cutoff:
            continue
        for v in adj[u]:
            if v not in dist:
                if v == t:
                    return dist[u] + 1
                dist[v] = dist[u] + 1
                queue.append(v)
    return cutoff + 1


def complete_bipartite(a: int, b: int) -> Graph:
    return build_graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def random_bipartite(a: int, b: int, p, seed: int = 0) -> Graph:
    rng = XorShift64Star(seed)
    pairs = [(i, a + j) for i in range(a) for j in range(b)]
    return build_graph(a + b, list(itertools.compress(pairs, rng.bernoulli_many(p, len(pairs)))))


def blowup_cycle(n: int, size: int) -> Graph:
    """C_n with every vertex replaced by a stable set of ``size`` vertices."""
    _need(n >= 3 and size >= 1, "blowup_cycle needs n >= 3, size >= 1")
    edges = []
    for i in range(n):
        j = (i + 1) % n
        edges.extend((i * size + a, j * size + b) for a in range(size) for b in range(size))
    return build_graph(n * size, edges)


GENERATORS = {
    "cycle": cycle,
    "path": path,
    "matching": matching,
    "complete": complete,
    "empty": empty,
    "kneser": kneser,
    "mycielski": mycielski,
    "random_gnp": random_gnp,
    "random_girth": random_girth,
    "complete_bipartite": complete_bipartite,
    "random_bipartite": random_bipartite,
    "blowup_cycle": blowup_cycle,
}
RANDOM_GENERATORS = {"random_gnp", "random_girth", "random_bipartite"}
