"""The numba and numpy code paths must agree."""
import numpy as np
import pytest

from treembed import _accel, coloring, embedding, graphs, kernels


def _trees():
    yield graphs.make_complete_tree(3, 4)
    yield graphs.make_geometric_binary(6)
    yield graphs.make_umbel(7)
    for s in range(6):
        yield graphs.make_random_tree(70, 1e-3, 1e3, 100 + s)


def _both(name, *args):
    a = getattr(kernels, f"_{name}_numba")(*args)
    b = getattr(kernels, f"_{name}_numpy")(*args)
    return a, b


@pytest.mark.parametrize("tree", list(_trees()), ids=lambda t: f"n{t.n}")
def test_tree_distance_matrix(tree):
    tin, tout = tree.preorder
    a, b = _both("tree_distance_matrix", tree.parent, tree.weight, tree.depth, tin, tout)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("tree", list(_trees()), ids=lambda t: f"n{t.n}")
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_lp_pairwise(tree, p):
    c = coloring.optimal_caterpillar_coloring(tree)
    pts = embedding.embed_tree(tree, c, p)
    a, b = _both("lp_pairwise", pts.colors, pts.values, p)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=0)


@pytest.mark.parametrize("tree", list(_trees()), ids=lambda t: f"n{t.n}")
def test_strong_kernels(tree):
    rho = graphs.tree_distance_matrix(tree)
    for c in (coloring.optimal_caterpillar_coloring(tree), coloring.all_distinct_coloring(tree)):
        colors, lengths, _ = c.profiles
        a, b = _both("best_delta", colors, lengths, rho)
        assert a == b
        for delta in (0.05, 0.2, a[0], min(1.0, a[0] * 1.5)):
            x, y = _both("verify_strong", colors, lengths, rho, delta)
            assert tuple(x) == tuple(y)


def test_max_ratio_and_triangle():
    rng = np.random.default_rng(5)
    pts = rng.normal(size=(40, 3))
    d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    e = d * rng.uniform(0.5, 2.0, size=d.shape)
    e = (e + e.T) / 2
    a, b = _both("max_ratio", e, d)
    assert a == b
    assert _both("triangle_violation", d, 1e-9) == ((-1, -1, -1), (-1, -1, -1))
    bad = d.copy()
    bad[0, 1] = bad[1, 0] = 100.0
    x, y = _both("triangle_violation", bad, 1e-9)
    assert x[0] >= 0 and y[0] >= 0


def test_dispatch_returns_python_types(backend):
    d = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert kernels.triangle_violation(d, 1e-9) is None
    val, i, j = kernels.max_ratio(2 * d, d)
    assert (val, i, j) == (2.0, 0, 1)


def _backend_in_subprocess(flag):
    import os
    import subprocess
    import sys
    env = dict(os.environ, TREEMBED_DISABLE_NUMBA=flag)
    code = "from treembed import _accel; print(_accel.backend_name())"
    return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                          check=True).stdout.strip()


def test_env_flag_selects_backend():
    assert _backend_in_subprocess("1") == "numpy"
    assert _backend_in_subprocess("0") == "numba"


def test_pipeline_same_under_both_backends(monkeypatch):
    from treembed.pipeline import run_pipeline
    tree = graphs.make_random_tree(80, 0.01, 100, 5)
    results = []
    for flag in (True, False):
        monkeypatch.setattr(_accel, "USE_NUMBA", flag)
        rep = run_pipeline(tree, 2.5)
        assert rep.within_bounds
        results.append((rep.lip, rep.lip_inv, rep.delta_best))
    np.testing.assert_allclose(results[0], results[1], rtol=1e-12)
