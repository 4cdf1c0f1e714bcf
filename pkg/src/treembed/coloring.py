"""Monotone edge colourings: caterpillar number, optimal colourings, strength."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import SizeError, ValidationError
from .graphs import WeightedRootedTree, tree_distance_matrix, tree_path_edges

BRUTE_FORCE_MAX_EDGES = 9


@dataclass(frozen=True, eq=False)
class EdgeColoring:
    """Colour of the parent edge of every non-root vertex (``-1`` at the root)."""

    tree: WeightedRootedTree
    color: np.ndarray

    def __post_init__(self):
        color = np.asarray(self.color, dtype=np.int64).copy()
        if color.shape != (self.tree.n,):
            raise ValidationError("colour array must have one entry per vertex")
        color[self.tree.root] = -1
        color.setflags(write=False)
        object.__setattr__(self, "color", color)
        used = np.unique(np.delete(color, self.tree.root))
        if used.size and (used[0] < 0 or not np.array_equal(used, np.arange(used.size))):
            raise ValidationError("colour ids must be dense 0..C-1")
        problem = monotonicity_problem(self.tree, color)
        if problem:
            raise ValidationError(f"coloring is not monotone: {problem}")

    @property
    def class_count(self) -> int:
        return int(self.color.max() + 1) if self.tree.n > 1 else 0

    @cached_property
    def profiles(self):
        """(colors, lengths, m): per-vertex class sequence along the root path.

        Row v lists the classes met from the root to v in order with the
        weight each contributes; rows are padded with colour -1 / length 0.
        """
        tree = self.tree
        seqs = [None] * tree.n
        seqs[tree.root] = ([], [])
        for v in tree.bfs_order[1:]:
            u = tree.parent[v]
            cs, ls = seqs[u]
            cs, ls = list(cs), list(ls)
            if u != tree.root and self.color[u] == self.color[v]:
                ls[-1] = ls[-1] + tree.weight[v]
            else:
                cs.append(int(self.color[v]))
                ls.append(float(tree.weight[v]))
            seqs[v] = (cs, ls)
        m = np.array([len(s[0]) for s in seqs], dtype=np.int64)
        K = max(int(m.max()), 1)
        colors = np.full((tree.n, K), -1, dtype=np.int64)
        lengths = np.zeros((tree.n, K))
        for v, (cs, ls) in enumerate(seqs):
            colors[v, :len(cs)] = cs
            lengths[v, :len(ls)] = ls
        for a in (colors, lengths, m):
            a.setflags(write=False)
        return colors, lengths, m

    def to_json(self) -> list:
        return [None if v == self.tree.root else int(c) for v, c in enumerate(self.color)]


@dataclass(frozen=True)
class ColoringStats:
    kappa: int
    delta: float
    classes: int

    def to_json(self) -> dict:
        return {"kappa": self.kappa, "delta": self.delta, "classes": self.classes}


def monotonicity_problem(tree: WeightedRootedTree, color) -> str | None:
    """Describe why ``color`` is not monotone, or return None."""
    tops = {}
    for v in range(tree.n):
        if v == tree.root:
            continue
        u = tree.parent[v]
        if u == tree.root or color[u] != color[v]:
            if color[v] in tops:
                return f"class {color[v]} is disconnected or branches at the root side ({tops[color[v]]}, {v})"
            tops[color[v]] = v
    for u in range(tree.n):
        if u == tree.root:
            continue
        same = [c for c in tree.children[u] if color[c] == color[u]]
        if len(same) > 1:
            return f"class {color[u]} branches at vertex {u}"
    return None


def coloring_stats(coloring: EdgeColoring) -> ColoringStats:
    delta = best_delta(coloring) if coloring.tree.n > 1 else float("nan")
    return ColoringStats(kappa_achieved(coloring), delta, coloring.class_count)


# ---------------------------------------------------------------------------
# caterpillar number
# ---------------------------------------------------------------------------

def _dp(tree: WeightedRootedTree):
    """Bottom-up table m[v] and the child each parent edge continues into."""
    m = np.zeros(tree.n, dtype=np.int64)
    choice = np.full(tree.n, -1, dtype=np.int64)
    for u in tree.bfs_order[::-1]:
        if u == tree.root:
            continue
        kids = tree.children[u]
        if not kids:
            m[u] = 1
            continue
        vals = [int(m[c]) for c in kids]
        top = max(vals)
        n_top = vals.count(top)
        second = max([x for x in vals if x != top], default=0)
        best, best_child = None, -1
        for c, val in zip(kids, vals):
            others = top if (val < top or n_top > 1) else second
            cost = max(val, 1 + others)
            if best is None or cost < best:
                best, best_child = cost, c
        m[u] = best
        choice[u] = best_child
    return m, choice


def caterpillar_number(tree: WeightedRootedTree) -> int:
    """Minimum over monotone colourings of the classes met on a root-leaf path."""
    if tree.n == 1:
        return 0
    m, _ = _dp(tree)
    return int(max(m[c] for c in tree.children[tree.root]))


def optimal_caterpillar_coloring(tree: WeightedRootedTree) -> EdgeColoring:
    _, choice = _dp(tree)
    color = np.full(tree.n, -1, dtype=np.int64)
    fresh = 0
    for v in tree.bfs_order[1:]:
        u = tree.parent[v]
        if u != tree.root and choice[u] == v:
            color[v] = color[u]
        else:
            color[v] = fresh
            fresh += 1
    return EdgeColoring(tree, color)


def all_distinct_coloring(tree: WeightedRootedTree) -> EdgeColoring:
    color = np.full(tree.n, -1, dtype=np.int64)
    color[tree.bfs_order[1:]] = np.arange(tree.n - 1)
    return EdgeColoring(tree, color)


def coloring_from_continuations(tree: WeightedRootedTree, cont: dict) -> EdgeColoring:
    """Colouring where the parent edge of u continues into child ``cont[u]`` (or stops)."""
    color = np.full(tree.n, -1, dtype=np.int64)
    fresh = 0
    for v in tree.bfs_order[1:]:
        u = tree.parent[v]
        if u != tree.root and cont.get(u) == v:
            color[v] = color[u]
        else:
            color[v] = fresh
            fresh += 1
    return EdgeColoring(tree, color)


def enumerate_monotone_colorings(tree: WeightedRootedTree):
    """Every monotone colouring, up to renaming of the classes."""
    inner = [v for v in range(tree.n) if v != tree.root]
    options = [(None,) + tree.children[v] for v in inner]
    for picks in itertools.product(*options):
        yield coloring_from_continuations(tree, dict(zip(inner, picks)))


def brute_force_kappa(tree: WeightedRootedTree) -> int:
    if tree.edge_count > BRUTE_FORCE_MAX_EDGES:
        raise SizeError(f"{tree.edge_count} edges exceeds the enumeration limit {BRUTE_FORCE_MAX_EDGES}")
    if tree.n == 1:
        return 0
    return min(kappa_achieved(c) for c in enumerate_monotone_colorings(tree))


def kappa_achieved(coloring: EdgeColoring) -> int:
    _, _, m = coloring.profiles
    return int(m.max())


# ---------------------------------------------------------------------------
# strong colourings
# ---------------------------------------------------------------------------

def color_length(coloring: EdgeColoring, c: int, x: int, y: int) -> float:
    """Total weight of class-c edges on the x--y path."""
    tree = coloring.tree
    total = 0.0
    for v in tree_path_edges(tree, x, y):
        if coloring.color[v] == c:
            total += tree.weight[v]
    return float(total)


def _rho(coloring, rho):
    return tree_distance_matrix(coloring.tree) if rho is None else rho


def verify_strong(coloring: EdgeColoring, delta: float, rho=None):
    """Check the delta-strong inequality on every pair.

    Returns None when it holds everywhere, else a violating pair (x, y).
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    if coloring.tree.n < 2:
        return None
    colors, lengths, _ = coloring.profiles
    return kernels.verify_strong(colors, lengths, _rho(coloring, rho), delta)


def best_delta_witness(coloring: EdgeColoring, rho=None):
    if coloring.tree.n < 2:
        raise ValueError("best_delta needs a tree with at least one edge")
    colors, lengths, _ = coloring.profiles
    delta, x, y = kernels.best_delta(colors, lengths, _rho(coloring, rho))
    return delta, (x, y)


def best_delta(coloring: EdgeColoring, rho=None) -> float:
    """Largest delta for which the colouring is delta-strong."""
    return best_delta_witness(coloring, rho)[0]
