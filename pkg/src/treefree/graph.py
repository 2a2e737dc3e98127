"""Immutable bitset graphs and the elementary extraction routines.

Vertex sets are plain Python ints used as bitsets over ``0..n-1`` (bit ``v``
set means ``v`` is a member).  Every routine that works "inside an induced
subgraph" takes the subgraph's vertex mask instead of building a new graph,
so vertex names stay stable through a whole pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import CliqueFound, GraphError, InvariantError

VertexSet = int


def vset(vertices: Iterable[int]) -> VertexSet:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def members(mask: VertexSet) -> list[int]:
    """Vertices of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def as_mask(s) -> VertexSet:
    if isinstance(s, int):
        return s
    return vset(s)


def lowest(mask: VertexSet) -> int:
    return (mask & -mask).bit_length() - 1


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on ``0..n-1`` with bitset adjacency."""

    n: int
    adj: tuple[int, ...]
    edge_count: int = field(compare=False)

    @property
    def full(self) -> VertexSet:
        return (1 << self.n) - 1

    def __len__(self) -> int:
        return self.n

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int, within: VertexSet | None = None) -> int:
        if within is None:
            return self.adj[v].bit_count()
        return (self.adj[v] & within).bit_count()

    def max_degree(self, within: VertexSet | None = None) -> int:
        X = self.full if within is None else within
        best = 0
        for v in members(X):
            dv = (self.adj[v] & X).bit_count()
            if dv > best:
                best = dv
        return best

    def max_degree_vertex(self, within: VertexSet | None = None) -> int:
        """A vertex of maximum degree in G[within], lowest index on ties."""
        X = self.full if within is None else within
        best, arg = -1, -1
        for v in members(X):
            dv = (self.adj[v] & X).bit_count()
            if dv > best:
                best, arg = dv, v
        return arg

    def edges_within(self, within: VertexSet | None = None) -> int:
        X = self.full if within is None else within
        return sum((self.adj[v] & X).bit_count() for v in members(X)) // 2

    def neighbourhood(self, S: VertexSet) -> VertexSet:
        """Vertices outside ``S`` with a neighbour in ``S``."""
        out = 0
        for v in members(S):
            out |= self.adj[v]
        return out & ~S

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in members(self.adj[u] >> (u + 1) << (u + 1))]

    def complement(self) -> "Graph":
        full = self.full
        adj = tuple((full ^ a) & ~(1 << v) for v, a in enumerate(self.adj))
        return Graph(self.n, adj, self.n * (self.n - 1) // 2 - self.edge_count)

    def induced(self, S: VertexSet) -> tuple["Graph", list[int]]:
        """Relabelled copy of G[S] plus the map new index -> old vertex."""
        old = members(S)
        index = {v: i for i, v in enumerate(old)}
        edges = [(index[u], index[v]) for u in old for v in members(self.adj[u] & S) if u < v]
        return build_graph(len(old), edges), old


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a graph, collapsing duplicate edges.  Loops and bad endpoints raise."""
    if n < 0:
        raise GraphError(f"negative vertex count {n}")
    adj = [0] * n
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise GraphError(f"self-loop at {u}")
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    m = sum(a.bit_count() for a in adj) // 2
    return Graph(n, tuple(adj), m)


def is_stable(G: Graph, S) -> bool:
    S = as_mask(S)
    return all(not (G.adj[v] & S) for v in members(S))


def is_clique(G: Graph, S) -> bool:
    S = as_mask(S)
    return all((G.adj[v] | (1 << v)) & S == S for v in members(S))


def at_most(value, bound) -> bool:
    """Non-strict comparison ``value <= bound`` in exact arithmetic."""
    return Fraction(value) <= Fraction(bound)


def fewer_than(value, bound) -> bool:
    """Strict comparison ``value < bound`` in exact arithmetic."""
    return Fraction(value) < Fraction(bound)


def degree_bounded(G: Graph, X: VertexSet, bound, strict: bool = True) -> bool:
    """Whether G[X] has maximum degree below (``strict``) or at most ``bound``."""
    cmp = fewer_than if strict else at_most
    return cmp(G.max_degree(X), bound)


def greedy_colouring(G: Graph, X: VertexSet | None = None, order: Sequence[int] | None = None) -> list[VertexSet]:
    """First-fit colouring of G[X]; returns the colour classes as masks."""
    X = G.full if X is None else X
    classes: list[int] = []
    for v in (members(X) if order is None else order):
        nb = G.adj[v]
        for i, c in enumerate(classes):
            if not nb & c:
                classes[i] = c | (1 << v)
                break
        else:
            classes.append(1 << v)
    return classes


def greedy_maxdeg_stable(G: Graph, X: VertexSet | None = None) -> VertexSet:
    """Largest class of a first-fit colouring: at least ``|X|/(Δ+1)`` vertices."""
    classes = greedy_colouring(G, X)
    if not classes:
        return 0
    return max(classes, key=lambda c: (c.bit_count(), -lowest(c)))


def turan_stable(G: Graph, X: VertexSet | None = None) -> VertexSet:
    """Min-degree greedy: take a minimum-degree vertex, delete its closed neighbourhood."""
    R = G.full if X is None else X
    S = 0
    while R:
        best, arg = None, -1
        for v in members(R):
            dv = (G.adj[v] & R).bit_count()
            if best is None or dv < best:
                best, arg = dv, v
                if dv == 0:
                    break
        S |= 1 << arg
        R &= ~(G.adj[arg] | (1 << arg))
    return S


class RamseyResult(NamedTuple):
    stable: VertexSet
    success: bool


def ramsey_stable(G: Graph, k: int, m: int, X: VertexSet | None = None) -> RamseyResult:
    """Look for a stable set of size ``m`` in G[X] assuming ω(G[X]) <= k.

    Recurses into the neighbourhood of a maximum-degree vertex with clique
    bound ``k-1``, then into its non-neighbourhood with target ``m-1``.  When
    ``|X| >= k**m`` and the clique bound holds this always succeeds; otherwise
    the largest stable set found is returned with ``success=False``.  A
    refutation of the clique bound met along the way raises ``CliqueFound``.
    """
    X = G.full if X is None else X
    if m <= 0:
        return RamseyResult(0, True)
    S = _ramsey(G, X, k, m, ())
    return RamseyResult(S, S.bit_count() >= m)


def _ramsey(G: Graph, X: int, k: int, m: int, chain: tuple[int, ...]) -> int:
    if m <= 0 or not X:
        return 0
    if k <= 1:
        for v in members(X):
            nb = G.adj[v] & X
            if nb:
                raise CliqueFound(chain + (v, lowest(nb)))
        S = 0
        for v in members(X)[:m]:
            S |= 1 << v
        return S
    v = G.max_degree_vertex(X)
    inside = _ramsey(G, G.adj[v] & X, k - 1, m, chain + (v,))
    if inside.bit_count() >= m:
        return inside
    outside = _ramsey(G, X & ~(G.adj[v] | (1 << v)), k, m - 1, chain) | (1 << v)
    return outside if outside.bit_count() >= inside.bit_count() else inside


def find_stable_of_size(G: Graph, X: VertexSet, m: int) -> VertexSet | None:
    """Exact search for a stable set of size ``m`` inside ``X`` (small inputs)."""
    if m <= 0:
        return 0
    if X.bit_count() < m:
        return None
    v = lowest(X)
    rest = X & ~(1 << v)
    found = find_stable_of_size(G, rest & ~G.adj[v], m - 1)
    if found is not None:
        return found | (1 << v)
    return find_stable_of_size(G, rest, m)


def find_clique(G: Graph, X: VertexSet, size: int) -> tuple[int, ...] | None:
    """Exact search for a clique of ``size`` vertices inside ``X``."""
    if size <= 0:
        return ()
    if X.bit_count() < size:
        return None
    v = lowest(X)
    rest = X & ~(1 << v)
    found = find_clique(G, rest & G.adj[v], size - 1)
    if found is not None:
        return (v,) + found
    return find_clique(G, rest, size)


def is_degenerate_in(G: Graph, X: VertexSet, d: int, universe: VertexSet | None = None) -> list[int] | None:
    """Order ``X`` so each vertex has <= d neighbours among later X-vertices and V∖X.

    ``V`` is ``universe`` (default: all of G).  Peeling any currently eligible
    vertex never hurts the others, so the greedy answer is exact.  Returns
    ``None`` when no such ordering exists.
    """
    V = G.full if universe is None else universe
    R = X & V
    outside = V & ~R
    order = []
    while R:
        live = R | outside
        pick = -1
        for v in members(R):
            if (G.adj[v] & live).bit_count() <= d:
                pick = v
                break
        if pick < 0:
            return None
        order.append(pick)
        R &= ~(1 << pick)
    return order


def check_degenerate_order(G: Graph, X: VertexSet, ordering: Sequence[int], d: int,
                           universe: VertexSet | None = None) -> bool:
    V = G.full if universe is None else universe
    if vset(ordering) != X or len(ordering) != X.bit_count() or X & ~V:
        return False
    live = V
    for v in ordering:
        live &= ~(1 << v)
        if (G.adj[v] & live).bit_count() > d:
            return False
    return True


def colour_degenerate(G: Graph, X: VertexSet, ordering: Sequence[int], d: int,
                      universe: VertexSet | None = None) -> list[VertexSet]:
    """Partition ``X`` into at most ``d+1`` stable sets along a degenerate ordering."""
    if not check_degenerate_order(G, X, ordering, d, universe):
        raise InvariantError("ordering is not a valid degenerate-in ordering")
    classes = greedy_colouring(G, X, list(reversed(ordering)))
    if len(classes) > d + 1:
        raise InvariantError(f"{len(classes)} classes for a {d}-degenerate ordering")
    return classes
