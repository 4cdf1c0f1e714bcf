import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from treembed import coloring as col, graphs
from treembed.embedding import (LIP_INVERSE_BOUND, VertexProfile, asserted_lip_bound, embed_tree, lip_bound,
                                lp_distance, profile, s_matrix, s_values)

from conftest import path_tree, small_random_trees


def coords_by_hand(entry, kappa, p):
    """f(x) straight from the formula, one profile at a time."""
    out = {}
    ls = entry.lengths
    for i, (c, li) in enumerate(zip(entry.colors, ls)):
        s = sum(max(lj - li / (2 * kappa), 0.0) for lj in ls[i:])
        out[c] = li ** (1 / p) * s ** ((p - 1) / p)
    return out


def test_profile_examples():
    t = path_tree([1.0, 1.0, 1.0])
    c = col.EdgeColoring(t, np.array([-1, 0, 0, 1]))
    assert profile(t, c, 0).m == 0
    assert profile(t, c, 3) == VertexProfile((0, 1), (2.0, 1.0))
    single = col.optimal_caterpillar_coloring(path_tree([2.0, 0.5]))
    assert profile(single.tree, single, 2) == VertexProfile((0,), (2.5,))


def test_s_values_examples():
    assert s_values(VertexProfile((0,), (3.0,)), 1) == [1.5]
    assert s_values(VertexProfile((0, 1), (2.0, 1.0)), 2) == [2.0, 0.75]
    with pytest.raises(ValueError):
        s_values(VertexProfile((0, 1), (2.0, 1.0)), 1)


def test_embed_examples():
    w = 3.0
    pts = embed_tree(path_tree([w]), col.optimal_caterpillar_coloring(path_tree([w])), 2.0)
    assert pts.coords(0) == {}
    assert math.isclose(pts.coords(1)[0], w / math.sqrt(2), rel_tol=1e-15)
    t = path_tree([1.0, 1.0])
    pts = embed_tree(t, col.optimal_caterpillar_coloring(t), 2.0)
    assert math.isclose(pts.coords(1)[0], math.sqrt(0.5), rel_tol=1e-15)
    assert math.isclose(pts.coords(2)[0], math.sqrt(2), rel_tol=1e-15)
    with pytest.raises(ValueError):
        embed_tree(t, col.optimal_caterpillar_coloring(t), 1.0)


def test_lp_distance_examples():
    t = path_tree([1.0])
    pts = embed_tree(t, col.optimal_caterpillar_coloring(t), 2.0)
    assert lp_distance(pts, 1, 1, 2.0) == 0
    assert math.isclose(lp_distance(pts, 0, 1, 2.0), 1 / math.sqrt(2), rel_tol=1e-15)
    with pytest.raises(ValueError):
        lp_distance(pts, 0, 1, 3.0)
    u = graphs.make_umbel(2)
    pts = embed_tree(u, col.all_distinct_coloring(u), 3.0)
    a, b = pts.coords(2), pts.coords(3)
    # tips 2 and 3 share the root--center class; the rest is disjoint
    own_a = [v for k, v in a.items() if k not in b][0]
    own_b = [v for k, v in b.items() if k not in a][0]
    assert math.isclose(lp_distance(pts, 2, 3, 3.0), (own_a ** 3 + own_b ** 3) ** (1 / 3), rel_tol=1e-13)


def test_embedding_matches_formula_and_kernel(backend):
    for t in [graphs.make_complete_tree(3, 3), graphs.make_random_tree(60, 1e-2, 1e2, 4)]:
        for c in (col.optimal_caterpillar_coloring(t), col.all_distinct_coloring(t)):
            p = 2.5
            pts = embed_tree(t, c, p)
            k = col.kappa_achieved(c)
            for v in range(t.n):
                hand = coords_by_hand(profile(t, c, v), k, p)
                assert pts.coords(v).keys() == hand.keys()
                for key in hand:
                    assert math.isclose(pts.coords(v)[key], hand[key], rel_tol=1e-12)
            pair = pts.pairwise()
            for x in range(0, t.n, 5):
                for y in range(0, t.n, 3):
                    assert math.isclose(pair[x, y], lp_distance(pts, x, y, p), rel_tol=1e-12, abs_tol=1e-300)


def test_profile_invariants():
    for t in small_random_trees(40, 40, low=0.1, high=10):
        c = col.optimal_caterpillar_coloring(t)
        k = col.kappa_achieved(c)
        for x in range(t.n):
            e = profile(t, c, x)
            assert e.m <= k
            assert all(l > 0 for l in e.lengths)
            assert all(a != b for a, b in zip(e.colors, e.colors[1:]))
            assert math.isclose(sum(e.lengths), graphs.tree_distance(t, t.root, x), rel_tol=1e-12)


def test_s_dominates_half_tail():
    for t in small_random_trees(40, 50, low=0.01, high=100):
        for c in (col.optimal_caterpillar_coloring(t), col.all_distinct_coloring(t)):
            colors, lengths, m = c.profiles
            s = s_matrix(lengths, max(col.kappa_achieved(c), 1))
            tail = np.cumsum(lengths[:, ::-1], axis=1)[:, ::-1]
            assert np.all(s >= 0.5 * tail * (1 - 1e-12))


def test_s_moves_at_most_edge_weight():
    for t in small_random_trees(40, 50, low=0.01, high=100):
        for c in (col.optimal_caterpillar_coloring(t), col.all_distinct_coloring(t)):
            colors, lengths, m = c.profiles
            s = s_matrix(lengths, max(col.kappa_achieved(c), 1))
            for y in range(t.n):
                x = t.parent[y]
                if x < 0:
                    continue
                for i in range(min(m[x], m[y])):
                    if colors[x, i] != colors[y, i]:
                        break
                    assert abs(s[x, i] - s[y, i]) <= t.weight[y] * (1 + 1e-12)


def _check_bounds(t, c, p):
    k = max(col.kappa_achieved(c), 1)
    rho = graphs.tree_distance_matrix(t)
    lp = embed_tree(t, c, p).pairwise()
    iu = np.triu_indices(t.n, 1)
    assert np.all(rho[iu] <= LIP_INVERSE_BOUND * lp[iu] * (1 + 1e-9))
    assert np.all(lp[iu] <= asserted_lip_bound(k, p) * rho[iu] * (1 + 1e-9))


@pytest.mark.parametrize("p", [1.2, 1.5, 2.0, 3.0, 7.0])
def test_lip_and_inverse_bounds(p):
    trees = [graphs.make_complete_tree(2, 5), graphs.make_umbel(5), graphs.make_geometric_binary(6)]
    trees += list(small_random_trees(15, 80, seed0=500, low=1e-3, high=1e3))
    for t in trees:
        _check_bounds(t, col.optimal_caterpillar_coloring(t), p)


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_all_distinct_coloring_bounds(p):
    for t in [graphs.make_complete_tree(3, 3), graphs.make_geometric_binary(7)] + list(small_random_trees(15, 60)):
        c = col.all_distinct_coloring(t)
        assert col.kappa_achieved(c) == int(t.depth.max())
        _check_bounds(t, c, p)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 40), seed=st.integers(0, 2**31), lam=st.floats(1e-3, 1e3), p=st.floats(1.1, 6))
def test_scale_equivariance(n, seed, lam, p):
    t = graphs.make_random_tree(n, 0.5, 2, seed)
    ts = t.scaled(lam)
    a = embed_tree(t, col.optimal_caterpillar_coloring(t), p)
    b = embed_tree(ts, col.optimal_caterpillar_coloring(ts), p)
    assert np.array_equal(a.colors, b.colors)
    assert np.allclose(b.values, lam * a.values, rtol=1e-12, atol=0)


def test_lip_bound_bases():
    assert lip_bound(1, 2, "2") == math.sqrt(6)
    assert math.isclose(lip_bound(1, 2, "e"), math.sqrt(6 * math.log(2)))
    for k in range(1, 20):
        assert asserted_lip_bound(k, 3) == lip_bound(k, 3, "2")


def test_jsonl_records():
    t = graphs.make_umbel(2)
    pts = embed_tree(t, col.optimal_caterpillar_coloring(t), 2)
    recs = list(pts.jsonl_records())
    assert recs[0] == {"v": 0, "coords": []}
    assert [r["v"] for r in recs] == list(range(t.n))
