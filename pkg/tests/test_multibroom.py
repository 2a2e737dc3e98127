import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import cycle, graphs, petersen, triangle_free_graphs
from treefree.errors import CliqueFound, ParameterError
from treefree.generators import matching
from treefree.graph import build_graph, is_stable, members
from treefree.multibroom import (BroomWitness, DegeneratePair, broom_or_degenerate, check_degenerate_pair,
                                 constant_chain, max_weighted_degree, multibroom_constant,
                                 multibroom_pattern, stable_weighted_recursive, weighted_stable_multibroom)
from treefree.outcomes import HypothesisViolation, StableSetCert, TreeWitness
from treefree.trees import MultibroomSpec, make_broom, make_path, make_star
from treefree.witness import exact_alpha, find_induced_tree, validate_outcome

ONE = Fraction(1)


def _edgeless_oracle(G):
    """Inner oracle for k = 2: neighbourhoods of a triangle-free graph are stable."""
    def oracle(C):
        for u in members(C):
            nb = G.adj[u] & C
            if nb:
                raise CliqueFound((u, nb.bit_length() - 1))
        return C
    return oracle


def _rooted_broom_exists(G, v, l, m, U):
    """Every induced (l, m)-broom rooted at v inside G[U], by brute force over paths."""
    verts = [u for u in members(U) if u != v]
    for path in itertools.permutations(verts, l):
        P = (v,) + path
        if any(not G.has_edge(P[i], P[i + 1]) for i in range(l)):
            continue
        if any(G.has_edge(P[i], P[j]) for i in range(l + 1) for j in range(i + 2, l + 1)):
            continue
        end = P[-1]
        cand = [u for u in verts if u not in P and G.has_edge(end, u)
                and not any(G.has_edge(u, p) for p in P[:-1])]
        for leaves in itertools.combinations(cand, m):
            if all(not G.has_edge(a, b) for a, b in itertools.combinations(leaves, 2)):
                return True
    return False


def test_constants():
    assert multibroom_constant(make_path(3).multibroom, 2) == Fraction(1, 288)
    assert multibroom_constant(MultibroomSpec(((1, 1),)), 2) == Fraction(1, 288)
    assert multibroom_constant(MultibroomSpec(((1, 2),)), 1) == 1
    spec = MultibroomSpec(((1, 2), (2, 1)))
    chain = constant_chain(spec, 3)
    assert chain[0] == 1
    # d_k = d_{k-1}^2 * 2^(2l+3) * |T| * (k^m + 1) with l = m = 2, |T| = 7.
    assert chain[1] == 2 ** 7 * 7 * (2 ** 2 + 1)
    assert chain[2] == chain[1] ** 2 * 2 ** 7 * 7 * (3 ** 2 + 1)
    assert multibroom_constant(spec, 3) == 1 / chain[2]


def test_max_weighted_degree():
    G = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    w = [Fraction(5), ONE, ONE, Fraction(3)]
    assert max_weighted_degree(G, w, G.full) == (Fraction(6), 1)
    assert max_weighted_degree(G, w, 0) == (0, -1)


def test_broom_or_degenerate_examples():
    single = build_graph(1, [])
    out = broom_or_degenerate(single, [ONE], 0, 2, 1, 2, ONE, _edgeless_oracle(single))
    assert isinstance(out, DegeneratePair) and out.X == out.Y == 0

    star = build_graph(6, [(0, i) for i in range(1, 6)])
    out = broom_or_degenerate(star, [ONE] * 6, 0, 2, 1, 2, ONE, _edgeless_oracle(star))
    assert isinstance(out, DegeneratePair)
    assert check_degenerate_pair(star, [ONE] * 6, 0, 2, 1, 2, ONE, star.full, out) == []

    # Spider with three legs of length 2: centre 0, legs 0-a-b.
    spider = build_graph(7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])
    for l, m in ((1, 2), (2, 0), (1, 1)):
        out = broom_or_degenerate(spider, [ONE] * 7, 0, 2, l, m, ONE, _edgeless_oracle(spider))
        if isinstance(out, BroomWitness):
            assert out.is_valid(spider, l, m) and out.path[0] == 0
        else:
            assert check_degenerate_pair(spider, [ONE] * 7, 0, 2, l, m, ONE, spider.full, out) == []
    assert _rooted_broom_exists(spider, 0, 2, 0, spider.full)
    assert not _rooted_broom_exists(spider, 0, 1, 2, spider.full)


def test_broom_or_degenerate_rejects_bad_root():
    G = build_graph(3, [(0, 1)])
    with pytest.raises(ParameterError):
        broom_or_degenerate(G, [ONE] * 3, 2, 2, 1, 1, ONE, _edgeless_oracle(G), U=0b011)
    with pytest.raises(ParameterError):
        broom_or_degenerate(G, [ONE] * 3, 0, 2, 0, 1, ONE, _edgeless_oracle(G))


@settings(max_examples=300, deadline=None)
@given(triangle_free_graphs(min_n=1, max_n=9), st.integers(1, 3), st.integers(0, 2), st.data())
def test_broom_or_degenerate_against_brute_force(G, l, m, data):
    w = data.draw(st.lists(st.fractions(0, 4, max_denominator=3), min_size=G.n, max_size=G.n))
    v = data.draw(st.integers(0, G.n - 1))
    out = broom_or_degenerate(G, w, v, 2, l, m, ONE, _edgeless_oracle(G))   # audited internally
    if isinstance(out, BroomWitness):
        assert out.is_valid(G, l, m) and out.path[0] == v
    else:
        assert check_degenerate_pair(G, w, v, 2, l, m, ONE, G.full, out) == []
        if not _rooted_broom_exists(G, v, l, m, G.full):
            assert isinstance(out, DegeneratePair)


def test_stable_weighted_recursive_base_and_matching():
    E = build_graph(5, [])
    S, c = stable_weighted_recursive(E, [ONE] * 5, make_path(3), 1)
    assert S == E.full and c == 1
    with pytest.raises(CliqueFound):
        stable_weighted_recursive(build_graph(2, [(0, 1)]), [ONE] * 2, make_path(3), 1)
    M = matching(10)
    S, c = stable_weighted_recursive(M, [ONE] * 10, make_path(3), 2)
    assert c == Fraction(1, 288) and S.bit_count() == 5 and is_stable(M, S)


@pytest.mark.parametrize("n,alpha", [(7, 3), (9, 4)])
def test_odd_cycles_with_claw_spec(n, alpha):
    G = cycle(n)
    T = make_broom(1, 2)
    assert find_induced_tree(G, multibroom_pattern(T)) is None
    out = weighted_stable_multibroom(G, None, T, 2)
    assert isinstance(out, StableSetCert) and validate_outcome(G, multibroom_pattern(T), 2, out, [ONE] * n).ok
    assert out.weight >= out.constant * n and out.size <= alpha == exact_alpha(G)[0]


def test_edgeless_and_petersen():
    E = build_graph(6, [])
    out = weighted_stable_multibroom(E, None, make_broom(1, 2), 2)
    assert out.size == 6 and out.weight == out.total_weight
    out = weighted_stable_multibroom(petersen(), None, make_broom(1, 2), 2)
    assert validate_outcome(petersen(), multibroom_pattern(make_broom(1, 2)), 2, out, [ONE] * 10).ok


def test_violation_and_zero_weights():
    K3 = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    out = weighted_stable_multibroom(K3, None, make_path(3), 2)
    assert isinstance(out, HypothesisViolation) and len(out.clique) == 3
    out = weighted_stable_multibroom(cycle(5), [0] * 5, make_path(4), 2)
    assert isinstance(out, StableSetCert) and out.size == 1
    with pytest.raises(ParameterError):
        weighted_stable_multibroom(cycle(5), [-1] * 5, make_path(4), 2)


def test_heavy_vertex_regression():
    # A K4-free graph where the first arm of the claw consumes S; the round
    # must still make progress by moving the heaviest vertex of S.
    E = [(0, 3), (0, 5), (0, 8), (0, 11), (1, 3), (1, 5), (1, 12), (2, 5), (2, 10), (2, 13), (3, 5),
         (3, 8), (3, 10), (3, 14), (4, 5), (4, 7), (4, 8), (4, 14), (5, 7), (5, 10), (5, 13), (6, 9),
         (6, 14), (7, 12), (8, 14), (10, 12), (10, 14), (11, 13)]
    F = Fraction
    w = [F(1, 2), F(4), F(5, 3), F(5), F(2), F(4, 3), F(3, 2), F(3, 2), F(4), F(1), F(0), F(0),
         F(1, 4), F(2, 3), F(0)]
    G = build_graph(15, E)
    out = weighted_stable_multibroom(G, w, make_star(3), 3)
    assert isinstance(out, StableSetCert) and out.details["heavy_moves"] >= 1
    assert validate_outcome(G, multibroom_pattern(make_star(3)), 3, out, weights=w).ok


SPECS = [make_path(3), make_path(4), make_star(3), make_broom(2, 2),
         MultibroomSpec(((1, 2), (2, 1)))]


@settings(max_examples=200, deadline=None)
@given(graphs(max_n=11), st.sampled_from(SPECS), st.integers(2, 3), st.data())
def test_weighted_outcomes_always_validate(G, T, k, data):
    w = data.draw(st.lists(st.fractions(0, 8, max_denominator=4), min_size=G.n, max_size=G.n))
    out = weighted_stable_multibroom(G, w, T, k)
    pattern = multibroom_pattern(T)
    rep = validate_outcome(G, pattern, k, out, weights=w)
    assert rep.ok, rep.messages
    if isinstance(out, StableSetCert):
        assert out.weight >= out.constant * out.total_weight
    if isinstance(out, TreeWitness) or rep.omega is None or rep.omega > k:
        return
    # On {T, K_{k+1}}-free inputs no witness can appear.
    if find_induced_tree(G, pattern) is None:
        assert isinstance(out, StableSetCert)
