"""Linear-weight stable sets in {multibroom, K_{k+1}}-free graphs.

Two layers:

``broom_or_degenerate``  from a root v, either grow an induced (l, m)-broom or
                         certify a heavy set X that is k^m-degenerate once a
                         set Y (and v) is removed.
``weighted_stable_multibroom``  collect such degenerate pieces until they
                         cover the graph, then colour the union greedily and
                         keep the heaviest class.  Brooms found from one root
                         are glued into a copy of the multibroom instead.

Stable sets inside neighbourhoods (clique number < k) come from the same
engine one level down, so the constant is a chain d_1 = 1, d_k = 1/c(d_{k-1}).
All weights are exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import CliqueFound, InvariantError, ParameterError, TreeFound
from .graph import (Graph, check_degenerate_order, colour_degenerate, find_stable_of_size,
                    is_stable, lowest, members, ramsey_stable)
from .outcomes import HypothesisViolation, SearchOutcome, StableSetCert, TreeWitness
from .trees import MultibroomSpec, TreePattern, make_multibroom

Oracle = Callable[[int], int]


def _weight(w: Sequence[Fraction], mask: int) -> Fraction:
    total = Fraction(0)
    while mask:
        low = mask & -mask
        total += w[low.bit_length() - 1]
        mask ^= low
    return total


def _heaviest_first(w: Sequence[Fraction], mask: int) -> list[int]:
    return sorted(members(mask), key=lambda u: (-w[u], u))


def max_weighted_degree(G: Graph, w: Sequence[Fraction], U: int) -> tuple[Fraction, int]:
    """``(Δ(G[U], w), v)`` with v the lowest-index vertex attaining it (-1 if U is empty)."""
    best, arg = Fraction(-1), -1
    for u in members(U):
        val = _weight(w, G.adj[u] & U)
        if val > best:
            best, arg = val, u
    return (best, arg) if arg >= 0 else (Fraction(0), -1)


def multibroom_constant(spec: MultibroomSpec, k: int) -> Fraction:
    """The level-k constant c with w(S) >= c w(G); c = 1 at k = 1."""
    d = Fraction(1)
    for level in range(2, k + 1):
        d = _level_factor(spec, level, d)
    return 1 / d


def constant_chain(spec: MultibroomSpec, k: int) -> list[Fraction]:
    """``[d_1, ..., d_k]`` with d_j = 1/c_j."""
    chain = [Fraction(1)]
    for level in range(2, k + 1):
        chain.append(_level_factor(spec, level, chain[-1]))
    return chain


def _level_factor(spec: MultibroomSpec, k: int, d: Fraction) -> Fraction:
    l, m = spec.max_length, spec.max_bristles
    return d * d * 2 ** (2 * l + 3) * spec.size * (k ** m + 1)


@dataclass(frozen=True)
class BroomWitness:
    """Induced broom: ``path[0]`` is the root, ``leaves`` hang off ``path[-1]``."""

    path: tuple[int, ...]
    leaves: tuple[int, ...]

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.path + self.leaves

    def is_valid(self, G: Graph, l: int, m: int) -> bool:
        if len(self.path) != l + 1 or len(self.leaves) != m:
            return False
        verts = self.vertices
        if len(set(verts)) != len(verts):
            return False
        want = {frozenset((self.path[i], self.path[i + 1])) for i in range(l)}
        want |= {frozenset((self.path[-1], x)) for x in self.leaves}
        for i, a in enumerate(verts):
            for b in verts[i + 1:]:
                if G.has_edge(a, b) != (frozenset((a, b)) in want):
                    return False
        return True


@dataclass
class DegeneratePair:
    X: int
    Y: int
    ordering: list[int]
    weight_X: Fraction = Fraction(0)
    weight_XY: Fraction = Fraction(0)


def check_degenerate_pair(G: Graph, w: Sequence[Fraction], v: int, k: int, l: int, m: int,
                          d: Fraction, U: int, pair: DegeneratePair) -> list[str]:
    """All three outcome inequalities, recomputed from scratch."""
    errs = []
    X, Y = pair.X, pair.Y
    if X & Y or (X | Y) >> v & 1 or (X | Y) & ~U:
        errs.append("X, Y not disjoint subsets of the universe minus the root")
    wX, wXY = _weight(w, X), _weight(w, X | Y)
    if d * 2 ** (2 * l) * wX < wXY:
        errs.append(f"ratio fails: w(X)={wX}, w(X∪Y)={wXY}")
    if wXY < _weight(w, G.adj[v] & U):
        errs.append("coverage fails: w(X∪Y) < w(N(v))")
    if not check_degenerate_order(G, X, pair.ordering, k ** m, U & ~(Y | 1 << v)):
        errs.append(f"X is not {k ** m}-degenerate in G∖(Y∪{{v}})")
    return errs


def _call_oracle(oracle: Oracle, C: int, apex: int) -> int:
    # C lies in N(apex); a clique the oracle refutes extends by the apex.
    try:
        return oracle(C)
    except CliqueFound as exc:
        raise CliqueFound(exc.clique + (apex,)) from None


@dataclass
class _Layers:
    L: list[int]
    R: list[int]
    J: list[int]
    delta: Fraction
    pred: dict[int, int] = field(default_factory=dict)

    def path_to(self, u: int) -> list[int]:
        path = [u]
        while path[-1] in self.pred:
            path.append(self.pred[path[-1]])
        return path[::-1]


def _build_layers(G: Graph, w: Sequence[Fraction], v: int, l: int, U: int) -> _Layers:
    adj = G.adj
    delta, _ = max_weighted_degree(G, w, U)
    cap = 2 * delta
    vbit = 1 << v
    L, R, J = [vbit], [], [0]
    pred: dict[int, int] = {}
    for i in range(1, l + 1):
        excl = J[i - 1] | vbit
        Ri, reach, reach_w = 0, 0, Fraction(0)
        # Greedy maximal R_{i-1}: heaviest first, keep the cap on its new neighbourhood.
        for u in _heaviest_first(w, L[i - 1]) if i > 1 else [v]:
            new = adj[u] & U & ~excl & ~reach
            new_w = _weight(w, new)
            if reach_w + new_w <= cap:
                Ri |= 1 << u
                reach |= new
                reach_w += new_w
        R.append(Ri)
        L.append(reach)
        J.append(J[i - 1] | reach)
        for u in members(reach):
            pred[u] = lowest(adj[u] & Ri)
        if reach_w > cap:
            raise InvariantError("layer heavier than 2Δ")
    return _Layers(L, R, J, delta, pred)


def _stable_m(G: Graph, nb: int, k: int, m: int) -> int | None:
    if nb.bit_count() >= k ** m:
        res = ramsey_stable(G, k, m, nb)
        if not res.success:
            raise InvariantError("Ramsey extraction failed on a large enough set")
        S = res.stable
        while S.bit_count() > m:
            S &= S - 1
        return S
    return find_stable_of_size(G, nb, m)


def broom_or_degenerate(G: Graph, w: Sequence[Fraction], v: int, k: int, l: int, m: int,
                        d: Fraction, oracle: Oracle, U: int | None = None,
                        audit: bool = True) -> BroomWitness | DegeneratePair:
    """Grow an induced (l, m)-broom rooted at v inside G[U], or certify it cannot be done cheaply.

    ``oracle(C)`` must return a stable subset S of C with d*w(S) >= w(C)
    whenever G[C] has clique number below k.  The degenerate outcome
    satisfies w(X) >= w(X∪Y)/(d 4^l), w(X∪Y) >= w(N(v)), and X is
    k^m-degenerate in G[U]∖(Y∪{v}).
    """
    U = G.full if U is None else U
    if not U >> v & 1:
        raise ParameterError("root must lie in the universe")
    if l < 1 or m < 0 or k < 1:
        raise ParameterError("need l >= 1, m >= 0, k >= 1")
    out = _broom_or_degenerate(G, w, v, k, l, m, Fraction(d), oracle, U, audit)
    if audit:
        if isinstance(out, BroomWitness):
            if not out.is_valid(G, l, m) or out.path[0] != v or any(not U >> x & 1 for x in out.vertices):
                raise InvariantError("returned broom is not an induced (l,m)-broom at the root")
        else:
            errs = check_degenerate_pair(G, w, v, k, l, m, Fraction(d), U, out)
            if errs:
                raise InvariantError("; ".join(errs))
    return out


def _broom_or_degenerate(G, w, v, k, l, m, d, oracle, U, audit):
    adj = G.adj
    vbit = 1 << v
    deleted = 0
    for u in members(U):
        if u != v and w[u] <= 0:
            deleted |= 1 << u
    U0 = U & ~deleted
    lay = _build_layers(G, w, v, l, U0)
    L, R, J, delta = lay.L, lay.R, lay.J, lay.delta
    wL = [_weight(w, x) for x in L]

    j = next((i for i in range(1, l) if wL[i + 1] < min(wL[i], delta)), None)

    if j is None:
        # Every layer kept up: stable pieces of L_l are degenerate or a broom appears.
        S_parts = []
        for vi in members(R[l - 1]):
            Ci = L[l] & adj[vi]
            for earlier in S_parts:
                Ci &= ~earlier[1]
            Si = _call_oracle(oracle, Ci, vi) if Ci else 0
            _check_oracle(G, w, Ci, Si, d)
            S_parts.append((Si, Ci))
        outside = U0 & ~(J[l] | vbit)
        later = outside
        for Si, _ in S_parts:
            later |= Si
        ordering = []
        for Si, _ in S_parts:
            later &= ~Si
            for u in members(Si):
                leaves = _stable_m(G, adj[u] & later, k, m)
                if leaves is not None:
                    return BroomWitness(tuple(lay.path_to(u)), tuple(members(leaves)))
                ordering.append(u)
        S = 0
        for Si, _ in S_parts:
            S |= Si
        Y = J[l - 1] | (L[l] & ~S) | deleted
        return DegeneratePair(S, Y, ordering, _weight(w, S), _weight(w, S | Y))

    # w(L_{j+1}) < Δ, so every vertex of L_j fits under the cap: R_j = L_j.
    if R[j] != L[j]:
        raise InvariantError("light next layer but R_j != L_j")
    if j == 1:
        S = _call_oracle(oracle, L[1], v)
        _check_oracle(G, w, L[1], S, d)
        Y = (L[1] & ~S) | L[2] | deleted
        return DegeneratePair(S, Y, members(S), _weight(w, S), _weight(w, S | Y))

    sub_l = l - j + 1
    ratio = 2 ** (2 * sub_l) * d
    X, Yp, ordering = 0, 0, []
    while X | Yp != L[j]:
        q = lowest(L[j] & ~(X | Yp))
        p = lay.pred[q]
        sub_U = (L[j] & ~(X | Yp)) | (1 << p)
        res = broom_or_degenerate(G, w, p, k, sub_l, m, d, oracle, sub_U, audit)
        if isinstance(res, BroomWitness):
            head = lay.path_to(p)
            return BroomWitness(tuple(head[:-1]) + res.path, res.leaves)
        if not res.X:
            raise InvariantError("augmentation made no progress")
        X |= res.X
        Yp |= res.Y
        ordering.extend(res.ordering)
        if ratio * _weight(w, X) < _weight(w, X | Yp):
            raise InvariantError("augmentation broke the weight ratio")
    Y = Yp | J[j - 1] | L[j + 1] | deleted
    return DegeneratePair(X, Y, ordering, _weight(w, X), _weight(w, X | Y))


def _check_oracle(G: Graph, w, C: int, S: int, d: Fraction) -> None:
    if S & ~C or not is_stable(G, S) or d * _weight(w, S) < _weight(w, C):
        raise InvariantError("inner stable-set oracle broke its guarantee")


@dataclass
class GrowStats:
    rounds: int = 0
    brooms: int = 0
    heavy_moves: int = 0


def _spec_of(T: TreePattern | MultibroomSpec) -> MultibroomSpec:
    if isinstance(T, MultibroomSpec):
        return T
    if T.multibroom is None:
        raise ParameterError(f"{T} is not given as a multibroom")
    return T.multibroom


def _multibroom_round_free(G, w, spec, k, d, oracle, U, stats, audit):
    """Main loop at one clique level; returns a stable mask or raises TreeFound."""
    adj = G.adj
    l, m, size = spec.max_length, spec.max_bristles, spec.size
    big = d * d * 2 ** (2 * l + 3) * size
    X, ordering = 0, []
    Y = 0
    for u in members(U):
        if w[u] <= 0:
            Y |= 1 << u
    while X | Y != U:
        stats.rounds += 1
        Gp = U & ~(X | Y)
        delta, v = max_weighted_degree(G, w, Gp)
        if delta == 0:
            # No edges left among positive weights: the rest is 0-degenerate.
            ordering.extend(members(Gp))
            X |= Gp
            continue
        Nv = adj[v] & Gp
        S = _call_oracle(oracle, Nv, v)
        _check_oracle(G, w, Nv, S, d)
        wS = _weight(w, S)
        Z = 0
        for z in members(Gp & ~(S | 1 << v)):
            if 2 * size * _weight(w, adj[z] & S) >= wS:
                Z |= 1 << z
        if _weight(w, Z) > 2 * size * delta:
            raise InvariantError("w(Z) above 2|T|Δ")
        Zp = Nv & ~S
        base = Gp & ~(Z | Zp)
        H = 1 << v
        embedding = [v]
        pair = None
        for li, mi in spec.arms:
            W = 0
            for h in members(H & ~(1 << v)):
                W |= (adj[h] | 1 << h)
            W &= base & ~(1 << v)
            res = broom_or_degenerate(G, w, v, k, li, mi, d, oracle, base & ~W, audit=audit)
            if isinstance(res, BroomWitness):
                stats.brooms += 1
                H |= sum(1 << x for x in res.vertices)
                embedding.extend(res.path[1:])
                embedding.extend(res.leaves)
                continue
            pair = (res, W)
            break
        if pair is None:
            raise TreeFound(embedding)
        res, W = pair
        newX, newY = X | res.X, Y | res.Y | Z | Zp | W | (1 << v)
        if big * _weight(w, newX) >= _weight(w, newX | newY):
            X, Y = newX, newY
            ordering.extend(res.ordering)
        else:
            # The arms already used a heavy part of S.  Then the heaviest
            # vertex of S pays for its own neighbourhood.
            h = _heaviest_first(w, S)[0]
            newX, newY = X | 1 << h, Y | (adj[h] & Gp)
            if big * _weight(w, newX) < _weight(w, newX | newY):
                raise InvariantError("neither the broom step nor the heavy-vertex step keeps the ratio")
            X, Y = newX, newY
            ordering.append(h)
            stats.heavy_moves += 1
        if audit and not check_degenerate_order(G, X, ordering, k ** m, U & ~Y):
            raise InvariantError(f"accumulated X is not {k ** m}-degenerate in G∖Y")
    classes = colour_degenerate(G, X, ordering, k ** m, X)
    best = 0
    best_w = Fraction(-1)
    for cls in classes:
        cw = _weight(w, cls)
        if cw > best_w:
            best, best_w = cls, cw
    return best


def stable_weighted_recursive(G: Graph, w: Sequence[Fraction], T: TreePattern | MultibroomSpec,
                              k: int, U: int | None = None, audit: bool = True,
                              stats: GrowStats | None = None) -> tuple[int, Fraction]:
    """Stable mask S of G[U] with w(S) >= c_k w(U); returns ``(S, c_k)``.

    Raises ``TreeFound`` with an embedding of the multibroom, or
    ``CliqueFound`` when G[U] has a clique on more than k vertices.
    """
    spec = _spec_of(T)
    U = G.full if U is None else U
    stats = GrowStats() if stats is None else stats
    if k < 1:
        raise ParameterError("clique bound must be positive")
    if k == 1:
        for u in members(U):
            nb = G.adj[u] & U
            if nb:
                raise CliqueFound((u, lowest(nb)))
        return U, Fraction(1)
    chain = constant_chain(spec, k)
    inner = lambda C: stable_weighted_recursive(G, w, spec, k - 1, C, audit, stats)[0]
    S = _multibroom_round_free(G, w, spec, k, chain[-2], inner, U, stats, audit)
    c = 1 / chain[-1]
    if not is_stable(G, S) or _weight(w, S) < c * _weight(w, U):
        raise InvariantError("final stable set misses w(S) >= c w(G)")
    return S, c


def weighted_stable_multibroom(G: Graph, w: Sequence | None, T: TreePattern | MultibroomSpec,
                               k: int, X: int | None = None, audit: bool = True) -> SearchOutcome:
    """Certificate with w(S) >= c w(G), a copy of the multibroom, or a clique above k.

    ``w`` defaults to the all-ones weighting.  A returned ``TreeWitness``
    indexes the tree built by ``make_multibroom`` from the spec.
    """
    spec = _spec_of(T)
    U = G.full if X is None else X
    w = [Fraction(1)] * G.n if w is None else [Fraction(x) for x in w]
    if len(w) != G.n or any(x < 0 for x in w):
        raise ParameterError("weights must be nonnegative, one per vertex")
    stats = GrowStats()
    try:
        S, c = stable_weighted_recursive(G, w, spec, k, U, audit, stats)
    except TreeFound as exc:
        return TreeWitness(exc.embedding)
    except CliqueFound as exc:
        return HypothesisViolation(exc.clique)
    if not S and U:
        # Only when w(U) = 0; any single vertex meets the bound.
        S = U & -U
    wS, wG = _weight(w, S), _weight(w, U)
    details = {"rounds": stats.rounds, "brooms": stats.brooms, "heavy_moves": stats.heavy_moves,
               "level_factors": [str(x) for x in constant_chain(spec, k)]}
    return StableSetCert(tuple(members(S)), c * U.bit_count() if _uniform(w, U) else Fraction(0),
                         "multibroom", wS, wG, c, details)


def _uniform(w: Sequence[Fraction], U: int) -> bool:
    return all(w[u] == 1 for u in members(U))


def multibroom_pattern(T: TreePattern | MultibroomSpec) -> TreePattern:
    return make_multibroom(_spec_of(T))
