import numpy as np
import pytest

from treembed import _accel, graphs


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run a test once per kernel backend."""
    monkeypatch.setattr(_accel, "USE_NUMBA", request.param == "numba")
    return request.param


def path_tree(weights):
    n = len(weights) + 1
    parent = np.arange(-1, n - 1)
    return graphs.WeightedRootedTree(parent, np.concatenate([[0.0], weights]), 0)


def star_tree(k):
    parent = np.array([-1] + [0] * k)
    return graphs.WeightedRootedTree(parent, np.concatenate([[0.0], np.ones(k)]), 0)


def small_random_trees(count, max_n=10, seed0=1000, low=1.0, high=1.0):
    rng = np.random.default_rng(seed0)
    for i in range(count):
        n = int(rng.integers(2, max_n + 1))
        yield graphs.make_random_tree(n, low, high, seed0 + i)
