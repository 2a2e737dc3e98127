"""Iterated sparsification: near-linear stable sets in {T, K_{k+1}}-free graphs.

The pipeline, bottom up:

``sparse_descend``   descend into neighbourhoods until the max degree drops.
``local_partition``  local-search partition whose largest part is sparse.
``key_step``         grow an induced copy of T vertex by vertex in dfs order;
                     when stuck, emit a sparse set A and a small blocker B.
``sparsify_once``    accumulate (A, B) pairs until the graph is exhausted and
                     return a large induced subgraph of much smaller degree.
``stable_set_sparse`` iterate ``sparsify_once`` down to an edgeless set.

All thresholds are compared in exact rational arithmetic.  Irrational
quantities (``2**-x**i``, the final bound) come from 128-bit interval
arithmetic, rounded in the direction that never over-claims.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from mpmath import iv, mp

from .errors import CliqueFound, InvariantError, ParameterError
from .graph import (Graph, find_clique, greedy_maxdeg_stable, is_stable, lowest,
                    members, ramsey_stable, turan_stable)
from .outcomes import HypothesisViolation, SearchOutcome, StableSetCert, TreeWitness
from .trees import TreePattern, dfs_enumeration

PRECISION = 128


@contextmanager
def _ivprec(bits: int):
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def _endpoint(x, upper: bool = False) -> Fraction:
    sign, man, exp, _ = x._mpi_[1 if upper else 0]
    val = Fraction(int(man)) * (Fraction(2) ** exp)
    return -val if sign else val


# --------------------------------------------------------------------------
# parameters and the closed-form guarantee

@dataclass(frozen=True)
class SparsifyParams:
    k: int
    r: int
    t: int
    y: tuple[Fraction, ...]

    @property
    def q(self) -> int:
        return (self.r - 1) * (self.k - 1)

    @property
    def c(self) -> int:
        return 20 * self.q * self.r * self.t * self.k ** self.t

    def check(self) -> None:
        if self.k < 2 or self.r < 2 or self.t < 2:
            raise ParameterError(f"need k, r, t >= 2 (got {self.k}, {self.r}, {self.t})")
        if len(self.y) != self.q + 1:
            raise ParameterError(f"need {self.q + 1} y values, got {len(self.y)}")
        for yi in self.y:
            if not 0 < yi < 1:
                raise ParameterError(f"y value {yi} outside (0, 1)")
        for p in range(1, self.q + 1):
            if self.y[p] * 3 * self.t > self.y[p - 1]:
                raise ParameterError(f"y[{p}] > y[{p - 1}]/(3t)")

    @classmethod
    def forced(cls, T: TreePattern, k: int, y: Sequence) -> "SparsifyParams":
        """Caller-chosen ``y``; only the ratio constraint is required."""
        p = cls(k, max(T.radius, 2), T.t, tuple(Fraction(v) for v in y))
        p.check()
        return p

    @classmethod
    def default(cls, T: TreePattern, k: int, d: int) -> "SparsifyParams":
        """``y_i = 2**(-x**i)`` with ``x = (log2 d)**(1/q)``, rounded down to 128 bits."""
        r = max(T.radius, 2)
        q = (r - 1) * (k - 1)
        return cls(k, r, T.t, default_y(q, d))


def forced_y(T: TreePattern, k: int, y0=Fraction(99, 100)) -> tuple[Fraction, ...]:
    """Largest ratios allowed after ``y0``: y_i = y_(i-1)/(3t)."""
    q = (max(T.radius, 2) - 1) * (k - 1)
    ys = [Fraction(y0)]
    for _ in range(q):
        ys.append(ys[-1] / (3 * T.t))
    return tuple(ys)


def default_y(q: int, d: int) -> tuple[Fraction, ...]:
    ys = [Fraction(1, 2)]
    with _ivprec(PRECISION + 32):
        x = iv.log(iv.mpf(d)) / iv.log(2)
        x = x ** (iv.mpf(1) / q)
        for i in range(1, q + 1):
            lo = _endpoint(iv.exp(-(x ** i) * iv.log(2)))
            ys.append(_round_down(lo, PRECISION))
    return tuple(ys)


def _round_down(x: Fraction, bits: int) -> Fraction:
    if x <= 0:
        return Fraction(0)
    e = bits - math.floor(math.log2(x)) - 1
    scale = Fraction(2) ** e
    return Fraction(math.floor(x * scale)) / scale


@dataclass(frozen=True)
class SparseGuarantee:
    n: int
    d: int
    k: int
    r: int
    t: int
    q: int
    c: int
    b: object                 # 128-bit nearest value of log2(4 c^2)
    b_interval: tuple[Fraction, Fraction]
    x: object                 # (log2 d) ** (1/q), 128-bit
    bound: Fraction           # lower end of 2**(-b (log2 d)**(1-1/q)) * n
    greedy_branch: bool       # x <= b/2: plain greedy already meets the bound


def sparse_guarantee(n: int, d: int, T: TreePattern, k: int) -> SparseGuarantee:
    """The near-linear bound ``2**(-b (log2 d)**(1-1/q)) * n`` with b = log2(4c^2)."""
    if d < 2:
        raise ValueError("degree bound must be at least 2")
    if k < 2:
        raise ValueError("clique bound must be at least 2")
    r = max(T.radius, 2)
    t = T.t
    q = (r - 1) * (k - 1)
    c = 20 * q * r * t * k ** t
    with mp.workprec(PRECISION):
        b = mp.log(4 * c * c, 2)
        x = mp.power(mp.log(d, 2), mp.mpf(1) / q)
    with _ivprec(PRECISION):
        b_iv = iv.log(iv.mpf(4 * c * c)) / iv.log(2)
        L = iv.log(iv.mpf(d)) / iv.log(2)
        expo = b_iv if q == 1 else b_iv * L ** (iv.mpf(q - 1) / q)
        val = iv.exp(-expo * iv.log(2)) * n
        bound = _endpoint(val)
        x_iv = L ** (iv.mpf(1) / q)
        # Greedy branch only when x <= b/2 is certain.
        greedy = _endpoint(x_iv, upper=True) <= _endpoint(b_iv) / 2
    return SparseGuarantee(n, d, k, r, t, q, c, b, (_endpoint(b_iv), _endpoint(b_iv, upper=True)),
                           x, max(bound, Fraction(0)), greedy)


# --------------------------------------------------------------------------
# elementary steps

def sparse_descend(G: Graph, k: int, thresholds: Sequence, X: int | None = None) -> tuple[int, int]:
    """Find ``p`` in 1..k and ``H ⊆ X`` with ``|H| >= n[p-1]`` and ``Δ(G[H]) < n[p]``.

    While the current set has a vertex of degree ``>= n[p]``, move into that
    vertex's neighbourhood.  Running out of levels exposes a clique of size
    ``k+1``, raised as ``CliqueFound``.
    """
    H = G.full if X is None else X
    n = [Fraction(v) for v in thresholds]
    if len(n) < k + 1:
        raise ValueError(f"need thresholds n_0..n_{k}")
    if any(v <= 0 for v in n):
        raise ValueError("thresholds must be positive")
    if n[0] > H.bit_count():
        raise ValueError("n_0 exceeds the vertex count")
    chain = []
    for p in range(1, k + 1):
        v = G.max_degree_vertex(H) if H else -1
        deg = G.degree(v, H) if H else 0
        if deg < n[p]:
            return p, H
        if p == k:
            w = lowest(G.adj[v] & H)
            raise CliqueFound(chain + [v, w])
        chain.append(v)
        H = G.adj[v] & H
    raise InvariantError("unreachable")  # pragma: no cover


def local_partition(G: Graph, d, parts: int, X: int | None = None) -> int:
    """A part of size ``>= |X|/parts`` with max degree ``< d/parts``, given Δ(G[X]) < d."""
    P = local_search_partition(G, d, parts, X)
    best = max(range(parts), key=lambda j: (P[j].bit_count(), -j))
    return P[best]


def local_search_partition(G: Graph, d, parts: int, X: int | None = None) -> list[int]:
    """Partition of X into ``parts`` classes where no single-vertex move lowers the internal edge count.

    Starts from a round-robin partition and moves single vertices to a part
    where they have strictly fewer neighbours until no move helps.
    """
    X = G.full if X is None else X
    if parts < 1:
        raise ValueError("need at least one part")
    if G.max_degree(X) >= d:
        raise ValueError("maximum degree is not below d")
    verts = members(X)
    where = {v: i % parts for i, v in enumerate(verts)}
    P = [0] * parts
    for v, i in where.items():
        P[i] |= 1 << v
    moved = True
    while moved:
        moved = False
        for v in verts:
            i = where[v]
            counts = [(G.adj[v] & P[j]).bit_count() for j in range(parts)]
            j = min(range(parts), key=lambda j: (counts[j], j))
            if counts[j] < counts[i]:
                P[i] &= ~(1 << v)
                P[j] |= 1 << v
                where[v] = j
                moved = True
    return P


def is_move_stable(G: Graph, partition: Sequence[int]) -> bool:
    for i, part in enumerate(partition):
        for v in members(part):
            here = (G.adj[v] & part).bit_count()
            if any((G.adj[v] & other).bit_count() < here for j, other in enumerate(partition) if j != i):
                return False
    return True


# --------------------------------------------------------------------------
# key step: grow the tree, or find (p, A, B)

class KeyStepResult(NamedTuple):
    p: int
    A: int
    B: int


@dataclass
class ReferenceState:
    """A partial copy of T plus its reference sets.

    ``phi`` lists host vertices in dfs order; ``path`` is the image of the
    active path; ``A[i]`` and ``P[i]`` are the references for ``path[i]``.
    """

    s: int
    phi: list[int]
    path: list[int]
    A: list[int]
    P: list[int]

    def copy(self) -> "ReferenceState":
        return ReferenceState(self.s, list(self.phi), list(self.path), list(self.A), list(self.P))


def _max_need(params: SparsifyParams, p: int, d) -> Fraction:
    return max(params.y[p] * d, Fraction(params.k ** params.t))


def check_reference_state(G: Graph, X: int, d: int, params: SparsifyParams,
                          state: ReferenceState, T: TreePattern | None = None,
                          order: Sequence[int] | None = None) -> list[str]:
    """Every failed good-copy condition, as messages (empty list = good)."""
    k, r, t, y = params.k, params.r, params.t, params.y
    s, A, P, path = state.s, state.A, state.P, state.path
    ell = len(path)
    U = 0
    for u in state.phi:
        U |= 1 << u
    bad = []
    if len(A) != min(ell, r) or len(P) != min(ell, r - 1):
        return [f"reference counts {len(A)}/{len(P)} wrong for active path length {ell}"]
    if T is not None and order is not None:
        emb = {order[i]: state.phi[i] for i in range(s)}
        sub = list(order[:s])
        for a in range(s):
            for b in range(a + 1, s):
                tree_adj = sub[b] in T.neighbours[sub[a]]
                if G.has_edge(emb[sub[a]], emb[sub[b]]) != tree_adj:
                    bad.append("partial map is not an induced copy of the prefix tree")
                    break
    seen = 0
    for i, Ai in enumerate(A, 1):
        if Ai & seen or Ai & U or Ai & ~X:
            bad.append(f"A_{i} overlaps another reference set, the image, or leaves X")
        seen |= Ai
        w = 1 << path[i - 1]
        if any(G.adj[a] & U != w for a in members(Ai)):
            bad.append(f"A_{i} has a vertex not attached to exactly w_{i} in the image")
    for i in range(1, len(P) + 1):
        p, Ai = P[i - 1], A[i - 1]
        if not 1 <= p <= (k - 1) * i:
            bad.append(f"p_{i}={p} outside 1..{(k - 1) * i}")
            continue
        if Ai.bit_count() < (1 - Fraction(s, 2 * t)) * y[p - 1] * d:
            bad.append(f"|A_{i}|={Ai.bit_count()} too small")
        if G.max_degree(Ai) >= y[p] * d:
            bad.append(f"G[A_{i}] max degree too large")
    if len(A) == r:
        Ar = A[r - 1]
        if not is_stable(G, Ar):
            bad.append("A_r not stable")
        if Ar.bit_count() < t - s:
            bad.append(f"|A_r|={Ar.bit_count()} < t-s={t - s}")
    for i in range(2, len(A) + 1):
        for h in range(1, i):
            Ah = A[h - 1]
            cap = Fraction(Ah.bit_count(), 2 * t - s)
            if any((G.adj[a] & Ah).bit_count() > cap for a in members(A[i - 1])):
                bad.append(f"A_{i} not 1/(2t-s)-sparse to A_{h}")
    return bad


def check_key_output(G: Graph, X: int, d: int, params: SparsifyParams, res: KeyStepResult) -> list[str]:
    p, A, B = res
    y, r, t = params.y, params.r, params.t
    bad = []
    if not 1 <= p <= params.q:
        bad.append(f"p={p} outside 1..q")
        return bad
    if A & B or (A | B) & ~X:
        bad.append("A, B overlap or leave X")
    if 2 * A.bit_count() < y[p - 1] * d:
        bad.append("|A| < y_{p-1} d / 2")
    if B.bit_count() > 2 * r * t * d:
        bad.append("|B| > 2rtd")
    if G.max_degree(A) >= y[p] * d:
        bad.append("G[A] max degree >= y_p d")
    rest = X & ~(A | B)
    need = _max_need(params, p, d)
    if any((G.adj[a] & rest).bit_count() >= need for a in members(A)):
        bad.append("a vertex of A has too many neighbours outside A ∪ B")
    return bad


def key_step(G: Graph, T: TreePattern, params: SparsifyParams, X: int | None = None,
             audit: bool = False, trace: list | None = None) -> KeyStepResult | TreeWitness:
    """Either ``(p, A, B)`` with A sparse and B small, or an induced copy of T.

    Requires ``Δ(G[X]) >= 6t / y_{q-1}``; otherwise ``ParameterError``.  The
    clique bound is the caller's assertion; a refutation raises ``CliqueFound``.
    With ``audit`` every intermediate reference state is checked exactly.
    """
    X = G.full if X is None else X
    params.check()
    k, r, t, q, y = params.k, params.r, params.t, params.q, params.y
    if T.t != t:
        raise ParameterError("pattern size does not match parameters")
    if T.radius > r:
        raise ParameterError("pattern radius exceeds r")
    d = G.max_degree(X)
    if d < 6 * t / y[q - 1]:
        raise ParameterError(f"max degree {d} below 6t/y_(q-1) = {6 * t / y[q - 1]}")
    enum = dfs_enumeration(T, T.center)
    order, attach = enum.order, enum.attach
    adj = G.adj

    v = G.max_degree_vertex(X)
    D = adj[v] & X
    try:
        p1, A1 = sparse_descend(G, k - 1, [y[i] * d for i in range(k)], D)
    except CliqueFound as exc:
        raise CliqueFound(exc.clique + (v,)) from None
    state = ReferenceState(1, [v], [v], [A1], [p1])

    while True:
        s = state.s
        if audit:
            bad = check_reference_state(G, X, d, params, state, T, order)
            if bad:
                raise InvariantError(f"reference state at s={s}: {bad}")
        if trace is not None:
            trace.append(state.copy())
        if s == t:
            emb = [0] * t
            for i, u in enumerate(state.phi):
                emb[order[i]] = u
            return TreeWitness(tuple(emb))
        j = attach[s]
        U = 0
        for u in state.phi:
            U |= 1 << u
        if j < r:
            B = U
            for u in state.phi:
                B |= adj[u]
            B &= X
            for Ai in state.A[:j]:
                cap = Fraction(Ai.bit_count(), 2 * t - s)
                for u in members(X & ~B):
                    if (adj[u] & Ai).bit_count() > cap:
                        B |= 1 << u
            Aj, pj = state.A[j - 1], state.P[j - 1]
            need = _max_need(params, pj, d)
            outside = X & ~(Aj | B)
            best, x = -1, -1
            for a in members(Aj):
                cnt = (adj[a] & outside).bit_count()
                if cnt >= need and cnt > best:
                    best, x = cnt, a
            if x < 0:
                # B holds N[U] and hence A_j; the pair must be disjoint.
                res = KeyStepResult(pj, Aj, B & ~Aj)
                bad = check_key_output(G, X, d, params, res)
                if bad:
                    raise InvariantError(f"key step output: {bad}")
                return res
        else:
            Ar = state.A[r - 1]
            if not Ar:
                raise InvariantError("A_r exhausted before the tree was embedded")
            x = lowest(Ar)

        closed_x = adj[x] | (1 << x)
        newA = [Ai & ~closed_x for Ai in state.A[:j]]
        newP = state.P[: min(j, r - 1)]
        if j < r:
            C = adj[x] & X & ~(Aj | B)
            if j == r - 1:
                found = ramsey_stable(G, k, t, C)
                if not found.success:
                    clique = find_clique(G, C, k)
                    if clique is None:
                        raise InvariantError("Ramsey extraction failed without a clique")
                    raise CliqueFound(clique + (x,))
                newA.append(found.stable)
            else:
                try:
                    p, Cp = sparse_descend(G, k - 1, [y[pj + i] * d for i in range(k)], C)
                except CliqueFound as exc:
                    raise CliqueFound(exc.clique + (x,)) from None
                newA.append(Cp)
                newP.append(pj + p)
        state = ReferenceState(s + 1, state.phi + [x], state.path[:j] + [x], newA, newP)


# --------------------------------------------------------------------------
# one sparsification round

class SparsifyResult(NamedTuple):
    p: int
    H: int


@dataclass
class Accumulator:
    entries: list[tuple[int, int, int]]     # (A_j, B_j, p_j)

    def check(self, G: Graph, X: int, d: int, params: SparsifyParams) -> list[str]:
        bad = []
        used = 0
        r, t, y = params.r, params.t, params.y
        for j, (A, B, p) in enumerate(self.entries, 1):
            if A & B or (A | B) & used or (A | B) & ~X:
                bad.append(f"entry {j} not disjoint from earlier entries")
            used |= A | B
            if 4 * r * t * A.bit_count() < y[p - 1] * B.bit_count():
                bad.append(f"entry {j}: |A| < y_(p-1)|B|/(4rt)")
            if G.max_degree(A) >= y[p] * d:
                bad.append(f"entry {j}: G[A] degree too large")
            rest = X & ~used
            need = _max_need(params, p, d)
            if any((G.adj[a] & rest).bit_count() > need for a in members(A)):
                bad.append(f"entry {j}: A has too many later neighbours")
        return bad


def sparsify_once(G: Graph, T: TreePattern, params: SparsifyParams, d: int | None = None,
                  X: int | None = None, audit: bool = False) -> SparsifyResult | TreeWitness:
    """An induced subgraph H with ``|H| >= y_{p-1}|X|/c`` and ``Δ(G[H]) < y_p d``.

    ``d`` bounds Δ(G[X]) (default: Δ itself).  Returns a ``TreeWitness``
    instead if the embedding step completes a copy of T.
    """
    X = G.full if X is None else X
    params.check()
    k, r, t, q, y = params.k, params.r, params.t, params.q, params.y
    if d is None:
        d = G.max_degree(X)
    if G.max_degree(X) > d:
        raise ParameterError("degree bound d is below the maximum degree")
    threshold = Fraction(6 * t) / y[q - 1]
    acc = Accumulator([])
    F = X
    while F:
        if G.max_degree(F) >= threshold:
            out = key_step(G, T, params, F, audit=audit)
            if isinstance(out, TreeWitness):
                return out
            p, A, B = out
        else:
            A = greedy_maxdeg_stable(G, F)
            B = F & ~A
            p = q
        acc.entries.append((A, B, p))
        F &= ~(A | B)
    if audit:
        bad = acc.check(G, X, d, params)
        if bad:
            raise InvariantError(f"accumulator: {bad}")

    sizes = {}
    for A, B, p in acc.entries:
        sizes[p] = sizes.get(p, 0) + A.bit_count() + B.bit_count()
    p = max(sorted(sizes), key=lambda i: sizes[i])
    C = 0
    for A, B, pj in acc.entries:
        if pj == p:
            C |= A
    edges = G.edges_within(C)
    if 2 * edges > 3 * _max_need(params, p, d) * C.bit_count():
        raise InvariantError("accumulated set has too many edges")
    if 2 * edges <= 3 * k ** t * C.bit_count():
        H, p_out = turan_stable(G, C), q
    else:
        cap = 6 * y[p] * d
        S1 = 0
        for v in members(C):
            if (G.adj[v] & C).bit_count() < cap:
                S1 |= 1 << v
        H, p_out = local_partition(G, cap, 6, S1), p
    res = SparsifyResult(p_out, H)
    if params.c * H.bit_count() < y[p_out - 1] * X.bit_count() or G.max_degree(H) >= y[p_out] * d:
        raise InvariantError("sparsification round missed its postcondition")
    return res


# --------------------------------------------------------------------------
# top level

def _shortcut_small_tree(G: Graph, T: TreePattern, X: int) -> SearchOutcome | None:
    if T.t == 0:
        return TreeWitness(())
    if T.t == 1:
        return TreeWitness((lowest(X),)) if X else None
    if T.t == 2:
        for v in members(X):
            nb = G.adj[v] & X
            if nb:
                return TreeWitness((v, lowest(nb)))
    return None


def stable_set_sparse(G: Graph, T: TreePattern, k: int, X: int | None = None,
                      y: Sequence | None = None, audit: bool = False) -> SearchOutcome:
    """A large stable set of G[X], an induced copy of T, or a clique above ``k``.

    Default mode claims the closed-form bound ``2**(-b (log2 d)**(1-1/q)) |X|``
    (at least 1 on nonempty input).  With ``y`` given (force mode) the
    iterated engine runs with those ratios and the certificate claims the
    bound actually certified by the rounds it performed.
    """
    X = G.full if X is None else X
    n = X.bit_count()
    try:
        if k < 1:
            raise ParameterError("clique bound must be positive")
        small = _shortcut_small_tree(G, T, X)
        if small is not None:
            return small
        if not n or G.max_degree(X) == 0:
            return StableSetCert(tuple(members(X)), Fraction(n), "trivial")
        if k == 1:
            v = G.max_degree_vertex(X)
            raise CliqueFound((v, lowest(G.adj[v] & X)))
        delta = G.max_degree(X)
        d = max(delta, 2)
        guar = sparse_guarantee(n, d, T, k)
        details = {"d": d, "q": guar.q, "r": guar.r, "c": guar.c}
        if y is None and guar.greedy_branch:
            S = greedy_maxdeg_stable(G, X)
            if (delta + 1) * S.bit_count() < n:
                raise InvariantError("greedy colouring class below n/(Δ+1)")
            return StableSetCert(tuple(members(S)), guar.bound, "sparse-greedy", details=details)
        params = SparsifyParams.default(T, k, d) if y is None else SparsifyParams.forced(T, k, y)
        if params.q != guar.q:
            raise ParameterError("y vector length does not match (r-1)(k-1)+1")
        cur = X
        rounds = 0
        factor = Fraction(1)
        while G.max_degree(cur):
            out = sparsify_once(G, T, params, G.max_degree(cur), cur, audit=audit)
            if isinstance(out, TreeWitness):
                return out
            factor *= params.y[out.p - 1] / params.c
            cur = out.H
            rounds += 1
            if rounds > n:
                raise InvariantError("sparsification did not converge")
        # Rounds needed: every round cuts the degree by at least y_1.
        if rounds and params.y[1] ** (rounds - 1) * d < 1:
            raise InvariantError(f"{rounds} rounds exceed the round-count bound")
        details.update(rounds=rounds, certified_factor=str(factor))
        if y is None:
            with mp.workprec(PRECISION):
                if rounds > guar.x ** (guar.q - 1) + 1:
                    raise InvariantError("round count above x^(q-1)+1")
            if factor * n < guar.bound:
                raise InvariantError("iterated run certified less than the closed-form bound")
            return StableSetCert(tuple(members(cur)), guar.bound, "sparse-iterated", details=details)
        return StableSetCert(tuple(members(cur)), factor * n, "sparse-forced", details=details)
    except CliqueFound as exc:
        return HypothesisViolation(exc.clique)
