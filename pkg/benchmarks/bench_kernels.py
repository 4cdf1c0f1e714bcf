#!/usr/bin/env python3
"""Time the numba kernels against their numpy fallbacks and check they agree.

    python benchmarks/bench_kernels.py --b 3 --h 6 --repeat 3
"""
import argparse
import time

import numpy as np

from treembed import _accel, coloring as col, graphs, kernels
from treembed.embedding import embed_tree


def best_of(fn, args, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def same(a, b):
    if isinstance(a, np.ndarray):
        return np.allclose(a, b, rtol=1e-12, atol=0)
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return a == b


def cases(tree, p):
    c = col.optimal_caterpillar_coloring(tree)
    colors, lengths, _ = c.profiles
    pts = embed_tree(tree, c, p)
    pre = (tree.parent, tree.weight, tree.depth, *tree.preorder)
    rho = graphs.tree_distance_matrix(tree)
    lp = pts.pairwise()
    delta = 1 / (4 * col.kappa_achieved(c))
    return [
        ("tree_distance_matrix", kernels._tree_distance_matrix_numba, kernels._tree_distance_matrix_numpy, pre),
        ("lp_pairwise", kernels._lp_pairwise_numba, kernels._lp_pairwise_numpy, (pts.colors, pts.values, p)),
        ("max_ratio", kernels._max_ratio_numba, kernels._max_ratio_numpy, (lp, rho)),
        ("triangle_violation", kernels._triangle_violation_numba, kernels._triangle_violation_numpy, (rho, 1e-9)),
        ("best_delta", kernels._best_delta_numba, kernels._best_delta_numpy, (colors, lengths, rho)),
        ("verify_strong", kernels._verify_strong_numba, kernels._verify_strong_numpy,
         (colors, lengths, rho, delta)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b", type=int, default=3)
    ap.add_argument("--h", type=int, default=6)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip", default="", help="comma-separated kernels to leave out")
    args = ap.parse_args()
    if not _accel.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")

    tree = graphs.make_complete_tree(args.b, args.h)
    skip = set(filter(None, args.skip.split(",")))
    print(f"complete tree b={args.b} h={args.h}: {tree.n} vertices, p={args.p}, best of {args.repeat}")
    print(f"{'kernel':<22}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  agree")
    for name, fast, slow, call_args in cases(tree, args.p):
        if name in skip:
            continue
        fast(*call_args)  # compile outside the timing
        t_fast, r_fast = best_of(fast, call_args, args.repeat)
        t_slow, r_slow = best_of(slow, call_args, args.repeat)
        print(f"{name:<22}{t_fast:>10.4f}{t_slow:>10.4f}{t_slow / t_fast:>8.1f}x  {same(r_fast, r_slow)}")


if __name__ == "__main__":
    main()
