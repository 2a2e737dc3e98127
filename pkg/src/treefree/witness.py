"""Exact oracles (α, ω, induced trees, χ*) and certificate validators.

Oracles refuse with ``OracleLimitError`` rather than approximate.  Nothing in
this module uses floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import exactlp
from .errors import OracleLimitError
from .graph import Graph, as_mask, is_clique, is_stable, lowest, members, vset
from .outcomes import HypothesisViolation, SearchOutcome, StableSetCert, TreeWitness
from .trees import TreePattern, dfs_enumeration

ALPHA_LIMIT = 60
EXHAUSTIVE_LIMIT = 20
TREE_LIMIT_T = 10
TREE_LIMIT_N = 60
FRAC_LIMIT = 16
MAXIMAL_SETS_CAP = 10**6


def _check_limit(what: str, value: int, limit: int) -> None:
    if value > limit:
        raise OracleLimitError(f"{what}={value} exceeds oracle limit {limit}")


def exact_alpha(G: Graph, X=None, limit: int = ALPHA_LIMIT) -> tuple[int, int]:
    """Maximum stable set of G[X] by branch and bound; returns ``(size, mask)``.

    Branches on a maximum-degree vertex (take it and drop its neighbours, or
    drop it), bounding with a greedy clique cover of what remains.
    """
    R = G.full if X is None else as_mask(X)
    _check_limit("n", R.bit_count(), limit)
    adj = G.adj
    best = [0, 0]

    def cover_bound(R: int) -> int:
        count = 0
        while R:
            v = lowest(R)
            cand = adj[v] & R
            R &= ~(1 << v)
            while cand:
                u = lowest(cand)
                R &= ~(1 << u)
                cand &= adj[u]
            count += 1
        return count

    def search(R: int, cur: int, size: int) -> None:
        # Vertices of degree <= 1 in G[R] lie in some maximum stable set.
        changed = True
        while changed and R:
            changed = False
            for v in members(R):
                if not R >> v & 1:
                    continue
                nb = adj[v] & R
                if nb.bit_count() <= 1:
                    cur |= 1 << v
                    size += 1
                    R &= ~(nb | (1 << v))
                    changed = True
        if not R:
            if size > best[0]:
                best[0], best[1] = size, cur
            return
        if size + cover_bound(R) <= best[0]:
            return
        v = G.max_degree_vertex(R)
        search(R & ~(adj[v] | (1 << v)), cur | (1 << v), size + 1)
        search(R & ~(1 << v), cur, size)

    search(R, 0, 0)
    return best[0], best[1]


def exact_alpha_exhaustive(G: Graph, X=None, limit: int = EXHAUSTIVE_LIMIT) -> int:
    """α by visiting every stable set; independent cross-check for ``exact_alpha``."""
    R = G.full if X is None else as_mask(X)
    _check_limit("n", R.bit_count(), limit)
    verts = members(R)
    best = 0
    stack = [(0, 0, 0)]  # (next index, chosen mask, size)
    while stack:
        i, chosen, size = stack.pop()
        best = max(best, size)
        for j in range(i, len(verts)):
            v = verts[j]
            if not G.adj[v] & chosen:
                stack.append((j + 1, chosen | (1 << v), size + 1))
    return best


def exact_omega(G: Graph, X=None, limit: int = ALPHA_LIMIT) -> int:
    return exact_alpha(G.complement(), X, limit)[0]


def max_clique(G: Graph, X=None, limit: int = ALPHA_LIMIT) -> tuple[int, ...]:
    return tuple(members(exact_alpha(G.complement(), X, limit)[1]))


def is_induced_copy(G: Graph, T: TreePattern, embedding: Sequence[int]) -> bool:
    """Whether ``embedding`` maps ``T`` isomorphically onto an induced subgraph of ``G``."""
    if len(embedding) != T.t or len(set(embedding)) != T.t:
        return False
    if any(not 0 <= v < G.n for v in embedding):
        return False
    tree_edges = {frozenset(e) for e in T.edges()}
    for a in range(T.t):
        for b in range(a + 1, T.t):
            if G.has_edge(embedding[a], embedding[b]) != (frozenset((a, b)) in tree_edges):
                return False
    return True


def find_induced_tree(G: Graph, T: TreePattern, X=None,
                      limit_t: int = TREE_LIMIT_T, limit_n: int = TREE_LIMIT_N) -> TreeWitness | None:
    """Backtracking search for an induced copy of ``T`` inside G[X].

    Tree vertices are placed in dfs order; each new vertex must be a neighbour
    of its placed parent and non-adjacent to every other placed vertex.
    """
    R = G.full if X is None else as_mask(X)
    _check_limit("t", T.t, limit_t)
    _check_limit("n", R.bit_count(), limit_n)
    if T.t == 0:
        return TreeWitness(())
    order = dfs_enumeration(T, T.center).order
    placed_parent = []
    for i, v in enumerate(order):
        placed_parent.append(-1 if i == 0 else next(u for u in T.neighbours[v] if u in order[:i]))
    adj = G.adj
    phi: dict[int, int] = {}

    def extend(i: int, image: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        if i == 0:
            cand = R
        else:
            gp = phi[placed_parent[i]]
            others = 0
            for u in phi.values():
                if u != gp:
                    others |= adj[u]
            cand = adj[gp] & R & ~image & ~others
        while cand:
            x = lowest(cand)
            cand &= cand - 1
            phi[v] = x
            if extend(i + 1, image | (1 << x)):
                return True
            del phi[v]
        return False

    if extend(0, 0):
        return TreeWitness(tuple(phi[i] for i in range(T.t)))
    return None


def induced_tree_exhaustive(G: Graph, T: TreePattern, X=None) -> TreeWitness | None:
    """Try every injective map of T into G[X]; the slow reference for ``find_induced_tree``."""
    verts = members(G.full if X is None else as_mask(X))
    for emb in itertools.permutations(verts, T.t):
        if is_induced_copy(G, T, emb):
            return TreeWitness(tuple(emb))
    return None


def maximal_stable_sets(G: Graph, X=None, cap: int = MAXIMAL_SETS_CAP) -> list[int]:
    """All maximal stable sets of G[X] (Bron-Kerbosch with pivoting on the complement)."""
    R0 = G.full if X is None else as_mask(X)
    nonadj = [(~a) & R0 & ~(1 << v) for v, a in enumerate(G.adj)]
    out: list[int] = []

    def bk(chosen: int, P: int, Xs: int) -> None:
        if not P and not Xs:
            out.append(chosen)
            if len(out) > cap:
                raise OracleLimitError(f"more than {cap} maximal stable sets")
            return
        PX = P | Xs
        pivot = max(members(PX), key=lambda u: ((nonadj[u] & P).bit_count(), -u))
        for v in members(P & ~nonadj[pivot]):
            bk(chosen | (1 << v), P & nonadj[v], Xs & nonadj[v])
            P &= ~(1 << v)
            Xs |= 1 << v

    if R0:
        bk(0, R0, 0)
    out.sort()
    return out


@dataclass
class FracChromatic:
    value: Fraction
    sets: list[int]
    cover: list[Fraction]                  # q(A) for each maximal stable set
    weights: list[Fraction] = field(default_factory=list)   # dual optimum w(v)


def frac_chromatic_primal(G: Graph, sets: list[int] | None = None) -> tuple[Fraction, list[Fraction]]:
    """min sum q(A) subject to every vertex covered with total weight >= 1."""
    sets = maximal_stable_sets(G) if sets is None else sets
    verts = list(range(G.n))
    # maximize -sum q   s.t.  -sum_{A ∋ v} q(A) <= -1
    A = [[-1 if S >> v & 1 else 0 for S in sets] for v in verts]
    sol = exactlp.maximize([-1] * len(sets), A, [-1] * len(verts))
    return -sol.value, sol.x


def frac_chromatic_dual(G: Graph, sets: list[int] | None = None) -> tuple[Fraction, list[Fraction]]:
    """max w(G) over weightings giving every stable set weight at most 1."""
    sets = maximal_stable_sets(G) if sets is None else sets
    A = [[1 if S >> v & 1 else 0 for v in range(G.n)] for S in sets]
    sol = exactlp.maximize([1] * G.n, A, [1] * len(sets))
    return sol.value, sol.x


def exact_frac_chromatic(G: Graph, limit: int = FRAC_LIMIT, with_dual: bool = False):
    """Exact χ*(G) from the covering LP over maximal stable sets.

    Returns a ``Fraction``; with ``with_dual=True`` returns a ``FracChromatic``
    carrying both optimal solutions (their values are asserted equal).
    """
    _check_limit("n", G.n, limit)
    if G.n == 0:
        return FracChromatic(Fraction(0), [], [], []) if with_dual else Fraction(0)
    sets = maximal_stable_sets(G)
    value, q = frac_chromatic_primal(G, sets)
    if not with_dual:
        return value
    dual_value, w = frac_chromatic_dual(G, sets)
    if dual_value != value:
        raise AssertionError(f"LP duality failed: {value} != {dual_value}")
    return FracChromatic(value, sets, q, w)


@dataclass
class ValidationReport:
    ok: bool
    kind: str
    messages: list[str] = field(default_factory=list)
    omega: int | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "kind": self.kind, "messages": self.messages, "omega": self.omega}


def validate_outcome(G: Graph, T: TreePattern, k: int, outcome: SearchOutcome,
                     weights: Sequence[Fraction] | None = None,
                     check_omega: bool = True) -> ValidationReport:
    """Recheck an engine outcome from scratch.

    Witnesses must be induced copies of ``T``; certificates must be stable and
    meet their claimed bound (and, for weighted certificates with ``weights``,
    the weight inequality); violations must be genuine cliques on more than
    ``k`` vertices.  ω(G) <= k is recomputed when within oracle limits.
    """
    msgs = []
    kind = getattr(outcome, "kind", type(outcome).__name__)
    if isinstance(outcome, TreeWitness):
        if not is_induced_copy(G, T, outcome.embedding):
            msgs.append("embedding is not an induced copy of the pattern")
    elif isinstance(outcome, StableSetCert):
        S = vset(outcome.vertices)
        if len(set(outcome.vertices)) != len(outcome.vertices) or any(not 0 <= v < G.n for v in outcome.vertices):
            msgs.append("certificate vertices invalid")
        elif not is_stable(G, S):
            msgs.append("certificate set is not stable")
        if outcome.size < outcome.required_size:
            msgs.append(f"size {outcome.size} below claimed bound {outcome.claimed_bound}")
        if G.n and outcome.size < 1:
            msgs.append("empty certificate on a nonempty graph")
        if outcome.constant is not None and weights is not None:
            wS = sum((Fraction(weights[v]) for v in outcome.vertices), Fraction(0))
            wG = sum((Fraction(x) for x in weights), Fraction(0))
            if wS != outcome.weight or wG != outcome.total_weight:
                msgs.append("recorded weights do not match the weighting")
            if wS < outcome.constant * wG:
                msgs.append(f"w(S)={wS} below c*w(G)={outcome.constant * wG}")
    elif isinstance(outcome, HypothesisViolation):
        if len(outcome.clique) <= k or not is_clique(G, vset(outcome.clique)) \
                or len(set(outcome.clique)) != len(outcome.clique):
            msgs.append("reported clique does not refute the clique bound")
    else:
        msgs.append(f"unknown outcome type {type(outcome).__name__}")
    omega = None
    if check_omega and G.n <= ALPHA_LIMIT:
        omega = exact_omega(G)
        if omega > k and not isinstance(outcome, HypothesisViolation):
            msgs.append(f"note: ω(G)={omega} exceeds k={k}; hypothesis does not hold")
    hard = [m for m in msgs if not m.startswith("note:")]
    return ValidationReport(not hard, kind, msgs, omega)
