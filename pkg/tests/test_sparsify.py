import math
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import cycle, graphs, to_nx, triangle_free_graphs
from treefree.errors import CliqueFound, ParameterError
from treefree.generators import blowup_cycle, random_bipartite
from treefree.graph import build_graph, is_stable, members
from treefree.outcomes import HypothesisViolation, StableSetCert, TreeWitness
from treefree.sparsify import (SparsifyParams, check_key_output, check_reference_state, default_y,
                               forced_y, is_move_stable, key_step, local_partition, sparse_descend,
                               sparse_guarantee, sparsify_once, stable_set_sparse)
from treefree.trees import dfs_enumeration, make_broom, make_path, make_star
from treefree.witness import exact_alpha, exact_omega, find_induced_tree, is_induced_copy, validate_outcome

P3, P4, K13 = make_path(3), make_path(4), make_star(3)
K3 = build_graph(3, [(0, 1), (1, 2), (0, 2)])


def test_sparse_descend_examples():
    E = build_graph(6, [])
    assert sparse_descend(E, 3, [6, 1, 1, 1]) == (1, E.full)
    assert sparse_descend(K3, 3, [1, 1, 1, 1]) == (3, 0b100)
    # C5 with thresholds (3,1,1): vertex 0 has degree 2, its neighbourhood {1,4} is stable.
    assert sparse_descend(cycle(5), 2, [3, 1, 1]) == (2, 0b10010)
    with pytest.raises(CliqueFound):
        sparse_descend(K3, 2, [1, 1, 1])
    with pytest.raises(ValueError):
        sparse_descend(E, 2, [7, 1, 1])


@settings(max_examples=300)
@given(graphs(max_n=12), st.integers(1, 4), st.data())
def test_sparse_descend_postconditions(G, k, data):
    n = [Fraction(data.draw(st.integers(1, 6)), data.draw(st.integers(1, 3))) for _ in range(k + 1)]
    n[0] = min(n[0], Fraction(max(G.n, 1)))
    if G.n == 0:
        return
    try:
        p, H = sparse_descend(G, k, n)
    except CliqueFound as exc:
        assert len(exc.clique) == k + 1
        assert exact_omega(G) > k
        return
    assert 1 <= p <= k
    assert H.bit_count() >= n[p - 1] and G.max_degree(H) < n[p]


def test_local_partition_examples():
    H = local_partition(cycle(6), 3, 2)
    assert H.bit_count() == 3 and is_stable(cycle(6), H)
    E = build_graph(7, [])
    assert local_partition(E, 1, 3).bit_count() == 3
    K4 = build_graph(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    H = local_partition(K4, 4, 4)
    assert H.bit_count() == 1
    with pytest.raises(ValueError):
        local_partition(K4, 3, 2)


@settings(max_examples=300)
@given(graphs(min_n=1, max_n=14), st.integers(1, 5), st.integers(0, 3))
def test_local_partition_postconditions(G, parts, slack):
    d = G.max_degree() + 1 + slack
    H = local_partition(G, d, parts)
    assert parts * H.bit_count() >= G.n
    assert parts * G.max_degree(H) < d


def test_move_stability_detector():
    C4 = cycle(4)
    assert is_move_stable(C4, [0b0101, 0b1010])
    assert not is_move_stable(C4, [0b1111, 0])


def test_params_checks():
    with pytest.raises(ParameterError):
        SparsifyParams.forced(P4, 2, [Fraction(1, 2), Fraction(1, 4)])   # ratio too large
    with pytest.raises(ParameterError):
        SparsifyParams.forced(P4, 2, [Fraction(1, 2)])                    # too short
    with pytest.raises(ParameterError):
        SparsifyParams.forced(P4, 2, [Fraction(1), Fraction(1, 100)])     # y_0 not below 1
    p = SparsifyParams.forced(P4, 3, forced_y(P4, 3))
    assert p.q == 2 and p.y[1] * 12 == p.y[0] and p.c == 20 * 2 * 2 * 4 * 3 ** 4


def test_default_y_shape():
    ys = default_y(2, 2 ** 16)
    assert ys[0] == Fraction(1, 2)
    # x = 4, so y_1 = 2^-4 and y_2 = 2^-16, rounded down.
    assert ys[1] <= Fraction(1, 16) and Fraction(1, 16) - ys[1] < Fraction(1, 2 ** 120)
    assert ys[2] <= Fraction(1, 2 ** 16) and Fraction(1, 2 ** 16) - ys[2] < Fraction(1, 2 ** 130)


def _decimal_log2(x: int) -> Decimal:
    getcontext().prec = 80
    return Decimal(x).ln() / Decimal(2).ln()


def test_guarantee_constants_p4():
    g = sparse_guarantee(1000, 64, P4, 2)
    assert (g.q, g.r, g.t, g.c) == (1, 2, 4, 2560)
    ref = _decimal_log2(26214400)
    lo, hi = g.b_interval
    assert Decimal(lo.numerator) / Decimal(lo.denominator) <= ref <= Decimal(hi.numerator) / Decimal(hi.denominator)
    # The 128-bit value is within one unit in the last place of the reference.
    b = Decimal(int(g.b.man)) * Decimal(2) ** int(g.b.exp)
    ulp = Decimal(2) ** (math.floor(math.log2(24.6)) - 127)
    assert abs(b - ref) <= ulp
    # q = 1: the exponent collapses and the bound is n * 2^-b = n / 26214400.
    assert g.bound <= Fraction(1000, 26214400)
    assert Fraction(1000, 26214400) - g.bound < Fraction(1, 2 ** 100)


def test_guarantee_degree_two_collapses():
    for T, k in ((P4, 3), (make_broom(2, 2), 2), (make_path(6), 3)):
        g = sparse_guarantee(500, 2, T, k)
        exact = Fraction(500) / (4 * g.c * g.c)
        assert g.bound <= exact and exact - g.bound < Fraction(1, 2 ** 100)


def test_guarantee_monotone():
    for k in (2, 3):
        for T in (P4, make_path(6)):
            bounds = [sparse_guarantee(1000, d, T, k).bound for d in (2, 4, 16, 256, 2 ** 12)]
            assert all(a >= b for a, b in zip(bounds, bounds[1:]))
    for d in (4, 100):
        bounds = [sparse_guarantee(1000, d, make_path(t), 3).bound for t in (4, 5, 6, 7)]
        assert all(a >= b for a, b in zip(bounds, bounds[1:]))


def test_key_step_refusals():
    with pytest.raises(ParameterError):
        key_step(cycle(8), P4, SparsifyParams.forced(P4, 2, forced_y(P4, 2)))


def _forced_instances():
    yield random_bipartite(150, 160, Fraction(1, 10), seed=3), P4, 2
    yield random_bipartite(200, 180, Fraction(1, 8), seed=11), K13, 2
    yield blowup_cycle(6, 20), make_broom(2, 2), 2
    yield random_bipartite(240, 260, Fraction(4, 5), seed=5), P3, 3


@pytest.mark.parametrize("G,T,k", list(_forced_instances()), ids=["bip-P4", "bip-K13", "blowup-broom", "dense-P3"])
def test_key_step_forced_audit(G, T, k):
    params = SparsifyParams.forced(T, k, forced_y(T, k))
    trace = []
    out = key_step(G, T, params, audit=True, trace=trace)
    d, order = G.max_degree(), dfs_enumeration(T, T.center).order
    for state in trace:
        assert check_reference_state(G, G.full, d, params, state, T, order) == []
    if isinstance(out, TreeWitness):
        assert is_induced_copy(G, T, out.embedding)
    else:
        assert check_key_output(G, G.full, d, params, out) == []


def test_sparsify_once_edgeless_and_forced():
    E = build_graph(20, [])
    params = SparsifyParams.forced(P4, 2, forced_y(P4, 2))
    assert sparsify_once(E, P4, params, d=1).H == E.full
    G = random_bipartite(150, 150, Fraction(1, 10), seed=1)
    out = sparsify_once(G, P4, params, audit=True)
    if not isinstance(out, TreeWitness):
        d = G.max_degree()
        assert params.c * out.H.bit_count() >= params.y[out.p - 1] * G.n
        assert G.max_degree(out.H) < params.y[out.p] * d


def test_stable_set_sparse_examples():
    out = stable_set_sparse(cycle(4), P4, 2)
    assert isinstance(out, StableSetCert) and out.size == 2 == exact_alpha(cycle(4))[0]
    E = build_graph(10, [])
    assert stable_set_sparse(E, P4, 2).size == 10
    out = stable_set_sparse(cycle(5), P4, 2)
    assert validate_outcome(cycle(5), P4, 2, out).ok
    assert isinstance(stable_set_sparse(K3, P4, 1), HypothesisViolation)
    # Trees on at most two vertices are found directly.
    assert isinstance(stable_set_sparse(cycle(5), make_path(2), 2), TreeWitness)


def test_stable_set_sparse_forced_mode():
    G = random_bipartite(150, 150, Fraction(1, 10), seed=2)
    out = stable_set_sparse(G, P4, 2, y=forced_y(P4, 2), audit=True)
    assert validate_outcome(G, P4, 2, out, check_omega=False).ok
    if isinstance(out, StableSetCert):
        assert out.mode == "sparse-forced" and out.details["rounds"] >= 1


@settings(max_examples=150, deadline=None)
@given(triangle_free_graphs(max_n=12), st.sampled_from([P4, K13, make_broom(2, 2)]))
def test_no_witness_on_free_instances(G, T):
    out = stable_set_sparse(G, T, 2)
    assert validate_outcome(G, T, 2, out).ok
    if find_induced_tree(G, T) is None:
        assert isinstance(out, StableSetCert)
