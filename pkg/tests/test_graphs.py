import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from treembed import graphs
from treembed.errors import ConnectivityError, SizeError, ValidationError

from conftest import path_tree


def test_complete_tree_sizes():
    t = graphs.make_complete_tree(2, 0)
    assert t.n == 1 and t.edge_count == 0
    t = graphs.make_complete_tree(2, 3)
    assert (t.n, t.edge_count) == (15, 14)
    t = graphs.make_complete_tree(3, 2)
    assert t.n == 13
    # leaves 4 and 12 hang under root children 1 and 3
    assert graphs.lca(t, 4, 12) == 0
    assert graphs.tree_distance(t, 4, 12) == 4


@pytest.mark.parametrize("b,h", [(1, 4), (2, 3), (3, 3), (4, 2)])
def test_complete_tree_shape(b, h):
    t = graphs.make_complete_tree(b, h)
    leaves = t.leaves
    assert len(leaves) == b ** h
    assert all(t.depth[v] == h for v in leaves)
    assert all(len(t.children[v]) == b for v in range(t.n) if t.depth[v] < h)
    assert np.all(t.weight[1:] == 1)


def test_complete_tree_overflow():
    with pytest.raises(SizeError):
        graphs.make_complete_tree(2, 70)


def test_umbel():
    assert graphs.make_umbel(1).edge_count == 2
    u = graphs.make_umbel(4)
    assert u.n == 6
    tips = range(2, 6)
    assert all(graphs.tree_distance(u, i, j) == 2 for i in tips for j in tips if i != j)
    assert all(graphs.tree_distance(u, 0, t) == 2 for t in tips)


def test_parasol_level_one():
    p = graphs.make_parasol(2, 1)
    d = graphs.metric_of(p).dist
    assert p.n == 5 and d[p.marks["r"], p.marks["s"]] == 3
    p = graphs.make_parasol(1, 1)
    d = graphs.metric_of(p).dist
    # r=0, center=1, tip=2, s=3
    assert d[0, 2] == 2 and d[2, 3] == 1


@pytest.mark.parametrize("b", [1, 2, 3])
@pytest.mark.parametrize("levels", [1, 2, 3])
def test_parasol_scaling(b, levels):
    prev = None
    for lvl, (g, skeleton) in enumerate(graphs.parasol_levels(b, levels), start=1):
        d = graphs.metric_of(g).dist
        assert d[g.marks["r"], g.marks["s"]] == 3 ** lvl
        assert len(g.edges) == (2 * b + 1) ** lvl
        if prev is not None:
            sub = d[np.ix_(skeleton, skeleton)]
            np.testing.assert_array_equal(sub, 3 * prev)
        prev = d


def test_parasol_level_two_distance():
    g = graphs.make_parasol(2, 2)
    assert graphs.metric_of(g).dist[g.marks["r"], g.marks["s"]] == 9


def test_geometric_binary():
    t = graphs.make_geometric_binary(1)
    assert list(t.weight[1:]) == [0.5, 0.5]
    t = graphs.make_geometric_binary(3)
    leaf = t.leaves[0]
    assert graphs.tree_distance(t, 0, leaf) == 0.875
    t = graphs.make_geometric_binary(2)
    assert graphs.tree_distance(t, 3, 4) == 0.5
    assert graphs.tree_distance(t, 3, 6) == 1.5
    with pytest.raises(SizeError):
        graphs.make_geometric_binary(51)


def test_random_tree():
    assert graphs.make_random_tree(1, 1, 1, 3).n == 1
    a = graphs.make_random_tree(100, 1, 1, 7)
    b = graphs.make_random_tree(100, 1, 1, 7)
    np.testing.assert_array_equal(a.parent, b.parent)
    np.testing.assert_array_equal(a.weight, b.weight)
    t = graphs.make_random_tree(50, 1e-3, 1e3, 42)
    assert np.all((t.weight[1:] >= 1e-3) & (t.weight[1:] <= 1e3))
    assert np.all(t.parent[1:] < np.arange(1, 50))
    with pytest.raises(ValueError):
        graphs.make_random_tree(5, 2.0, 1.0, 0)
    with pytest.raises(ValueError):
        graphs.make_random_tree(5, 0.0, 1.0, 0)


def test_lca():
    t = graphs.make_complete_tree(2, 2)
    assert graphs.lca(t, 5, 5) == 5
    assert graphs.lca(t, 0, 6) == 0
    assert graphs.lca(t, 3, 4) == 1
    with pytest.raises(ValueError):
        graphs.lca(t, 0, 7)


def test_tree_distance_examples():
    t = graphs.make_complete_tree(2, 3)
    assert graphs.tree_distance(t, 9, 9) == 0
    assert graphs.tree_distance(t, 7, 14) == 6


def test_invalid_trees():
    with pytest.raises(ValidationError):
        graphs.WeightedRootedTree(np.array([-1, 2, 1]), np.array([0.0, 1.0, 1.0]))
    with pytest.raises(ValidationError):
        graphs.WeightedRootedTree(np.array([-1, 0]), np.array([0.0, -1.0]))


def test_metric_single_edge_and_umbel():
    d = graphs.metric_of(path_tree([2.5])).dist
    np.testing.assert_array_equal(d, [[0, 2.5], [2.5, 0]])
    u = graphs.make_umbel(3)
    d = graphs.metric_of(u).dist
    for x in range(u.n):
        for y in range(u.n):
            assert d[x, y] == graphs.tree_distance(u, x, y)


def test_disconnected_graph():
    g = graphs.WeightedGraph(n=3, edges=((0, 1, 1.0),))
    with pytest.raises(ConnectivityError):
        graphs.metric_of(g)


def test_graph_validation():
    with pytest.raises(ValidationError):
        graphs.WeightedGraph(n=2, edges=((0, 0, 1.0),))
    with pytest.raises(ValidationError):
        graphs.WeightedGraph(n=2, edges=((0, 1, 1.0), (1, 0, 2.0)))


def test_metric_space_validation():
    with pytest.raises(ValidationError):
        graphs.FiniteMetricSpace(np.array([[0, 1, 3], [1, 0, 1], [3, 1, 0]], dtype=float))
    with pytest.raises(ValidationError):
        graphs.FiniteMetricSpace(np.array([[0, 1], [2, 0]], dtype=float))
    graphs.FiniteMetricSpace(np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]], dtype=float))


def _families():
    yield graphs.make_complete_tree(3, 3)
    yield graphs.make_umbel(5)
    yield graphs.make_geometric_binary(5)
    for s in range(5):
        yield graphs.make_random_tree(40, 1e-3, 1e3, s)


def test_matrix_matches_scalar_exactly(backend):
    for t in _families():
        d = graphs.tree_distance_matrix(t)
        for x in range(t.n):
            for y in range(t.n):
                assert d[x, y] == graphs.tree_distance(t, x, y)


def test_tree_metric_agrees_with_dijkstra():
    for t in _families():
        d_tree = graphs.metric_of(t).dist
        d_graph = graphs.metric_of(graphs.tree_to_graph(t)).dist
        np.testing.assert_allclose(d_tree, d_graph, rtol=1e-12, atol=0)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 60), seed=st.integers(0, 2**63 - 1))
def test_triangle_inequality(n, seed):
    t = graphs.make_random_tree(n, 1e-3, 1e3, seed)
    graphs.check_metric(graphs.metric_of(t).dist) if n > 1 else None


def test_triangle_on_parasol():
    graphs.check_metric(graphs.metric_of(graphs.make_parasol(2, 3)).dist)
