import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from treefree.trees import (MultibroomSpec, dfs_enumeration, is_dfs_enumeration, make_broom,
                            make_multibroom, make_path, make_star, parse_pattern, radius,
                            tree_from_edges, tree_path)


def _nx(T):
    g = nx.Graph()
    g.add_nodes_from(range(T.t))
    g.add_edges_from(T.edges())
    return g


def test_broom_examples():
    B = make_broom(1, 3)
    assert B.t == 5 and sorted(len(x) for x in B.neighbours) == [1, 1, 1, 1, 4]
    P = make_broom(3, 0)
    assert P.t == 4 and nx.is_isomorphic(_nx(P), nx.path_graph(4))
    C = make_broom(2, 2)
    assert C.t == 5 and radius(C) == 2
    with pytest.raises(ValueError):
        make_broom(0, 2)


def test_multibroom_examples():
    assert nx.is_isomorphic(_nx(make_multibroom([(1, 1), (1, 1)])), nx.path_graph(5))
    T = make_multibroom([(1, 2)])
    assert T.t == 4 and nx.is_isomorphic(_nx(T), _nx(make_broom(1, 2)))
    assert make_multibroom([(2, 3), (1, 0)]).t == 1 + (2 + 3) + (1 + 0) == 7
    assert make_multibroom([]).t == 1
    # Longest path runs bristle to the other arm end (length 5), so the radius is 3.
    T = make_multibroom([(2, 3), (2, 0)])
    assert radius(T) == nx.radius(_nx(T)) == 3


def test_radius_examples():
    assert radius(make_path(1)) == 0
    assert radius(make_path(4)) == 2
    assert radius(make_star(3)) == 1


def test_parse_pattern():
    assert parse_pattern("broom:2,2").t == 5
    assert parse_pattern("multibroom:(1,2),(2,1)").t == 7
    assert parse_pattern("path:4").t == 4
    assert parse_pattern("star:3").t == 4
    for bad in ("broom:0,1", "multibroom:(1,2)x", "tree:3", "path:x"):
        with pytest.raises(ValueError):
            parse_pattern(bad)


def test_paths_stars_and_brooms_carry_their_multibroom_spec():
    for T in (make_path(2), make_path(3), make_path(6), make_star(4), make_broom(2, 3)):
        assert T.multibroom is not None
        assert make_multibroom(T.multibroom).parent == T.parent


def test_dfs_examples():
    P3 = make_path(3)
    assert dfs_enumeration(P3, 0).order == (0, 1, 2)
    S = make_star(3)
    d = dfs_enumeration(S, S.center)
    assert d.order[0] == S.center and all(len(p) <= 2 for p in d.active_paths)
    B = make_broom(2, 2)
    d = dfs_enumeration(B, 0)
    assert is_dfs_enumeration(B, d.order)
    # The length-2 handle is listed before any bristle.
    assert set(d.order[:3]) == set(tree_path(B, 0, 2)) == {0, 1, 2}


def test_rejects_bad_parent_arrays():
    with pytest.raises(ValueError):
        tree_from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        MultibroomSpec(((0, 1),))


def _all_trees(max_t):
    yield from (tree_from_edges(1, []),)
    for t in range(2, max_t + 1):
        for g in nx.nonisomorphic_trees(t):
            yield tree_from_edges(t, list(g.edges()))


@pytest.mark.parametrize("T", list(_all_trees(8)), ids=str)
def test_dfs_enumeration_properties_every_root(T):
    assert radius(T) == (nx.radius(_nx(T)) if T.t > 1 else 0)
    for root in range(T.t):
        d = dfs_enumeration(T, root)
        order = d.order
        assert order[0] == root and is_dfs_enumeration(T, order)
        pos = {v: i for i, v in enumerate(order)}
        for i in range(T.t):
            prefix = set(order[: i + 1])
            assert nx.is_connected(_nx(T).subgraph(prefix))
            assert list(d.active_paths[i]) == tree_path(T, root, order[i])
            for v in order[i + 1:]:
                for u in T.neighbours[v]:
                    if u in prefix:
                        assert u in d.active_paths[i]
            if i >= 1 and len(T.neighbours[order[i]]) == 1:
                assert all(pos[u] < i for u in T.neighbours[order[i]])


arms = st.lists(st.tuples(st.integers(1, 4), st.integers(0, 4)), max_size=4)


@given(arms)
def test_multibroom_size_and_radius_bound(spec):
    T = make_multibroom(spec)
    assert T.t == 1 + sum(l + m for l, m in spec)
    assert nx.is_tree(_nx(T))
    if spec:
        assert radius(T) <= 1 + max(l + min(m, 1) for l, m in spec)


@given(st.integers(1, 6), st.integers(0, 6))
def test_broom_radius_bound(l, m):
    T = make_broom(l, m)
    assert T.t == l + m + 1 and radius(T) <= l + 1
    assert max(T.distances_from(0)) == l + min(1, m)
