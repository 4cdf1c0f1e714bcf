"""Weighted trees, umbels, parasols and their shortest-path metrics."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from . import kernels
from .errors import ConnectivityError, SizeError, ValidationError

INT_LIMIT = np.iinfo(np.int64).max
GEOMETRIC_MAX_HEIGHT = 50
TRIANGLE_TOL = 1e-9


def _readonly(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeightedRootedTree:
    """Rooted tree with positive edge weights.

    ``parent[v]`` is the parent of ``v`` (``-1`` at the root) and ``weight[v]``
    the weight of the edge ``parent[v] -- v`` (``0`` at the root).
    """

    parent: np.ndarray
    weight: np.ndarray
    root: int = 0

    def __post_init__(self):
        parent = np.asarray(self.parent, dtype=np.int64).copy()
        weight = np.asarray(self.weight, dtype=np.float64).copy()
        n = parent.shape[0]
        if n < 1 or parent.ndim != 1 or weight.shape != parent.shape:
            raise ValidationError("parent and weight must be 1-d arrays of equal positive length")
        root = int(self.root)
        if not 0 <= root < n:
            raise ValidationError(f"root {root} out of range")
        if parent[root] != -1:
            raise ValidationError("root must have parent -1")
        weight[root] = 0.0
        others = np.arange(n) != root
        if np.any((parent[others] < 0) | (parent[others] >= n)):
            raise ValidationError("parent id out of range")
        if np.any(~(weight[others] > 0)) or not np.all(np.isfinite(weight)):
            raise ValidationError("edge weights must be positive and finite")
        object.__setattr__(self, "parent", _readonly(parent))
        object.__setattr__(self, "weight", _readonly(weight))
        object.__setattr__(self, "root", root)
        # every vertex must be reached from the root
        if self.bfs_order.shape[0] != n:
            raise ValidationError("parent pointers contain a cycle")

    @property
    def n(self) -> int:
        return int(self.parent.shape[0])

    @property
    def edge_count(self) -> int:
        return self.n - 1

    @cached_property
    def children(self) -> tuple:
        kids = [[] for _ in range(self.n)]
        for v in range(self.n):
            p = self.parent[v]
            if p >= 0:
                kids[p].append(v)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def bfs_order(self) -> np.ndarray:
        order = [self.root]
        queue = deque(order)
        while queue:
            v = queue.popleft()
            for c in self.children[v]:
                order.append(c)
                queue.append(c)
        return _readonly(np.array(order, dtype=np.int64))

    @cached_property
    def depth(self) -> np.ndarray:
        """Hop count from the root."""
        d = np.zeros(self.n, dtype=np.int64)
        for v in self.bfs_order[1:]:
            d[v] = d[self.parent[v]] + 1
        return _readonly(d)

    @cached_property
    def preorder(self) -> tuple[np.ndarray, np.ndarray]:
        """(tin, tout): subtree of v occupies preorder positions tin[v]..tout[v]-1."""
        tin = np.zeros(self.n, dtype=np.int64)
        tout = np.zeros(self.n, dtype=np.int64)
        t = 0
        stack = [(self.root, False)]
        while stack:
            v, done = stack.pop()
            if done:
                tout[v] = t
                continue
            tin[v] = t
            t += 1
            stack.append((v, True))
            for c in reversed(self.children[v]):
                stack.append((c, False))
        return _readonly(tin), _readonly(tout)

    @property
    def leaves(self) -> list[int]:
        return [v for v in range(self.n) if not self.children[v] and (v != self.root or self.n == 1)]

    @property
    def height(self) -> int:
        return int(self.depth.max())

    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(self.parent[v]), v, float(self.weight[v])) for v in range(self.n) if v != self.root]

    def scaled(self, factor: float) -> "WeightedRootedTree":
        return WeightedRootedTree(self.parent, self.weight * factor, self.root)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    n: int
    edges: tuple
    marks: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for u, v, w in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValidationError(f"edge ({u}, {v}) out of range")
            if u == v:
                raise ValidationError(f"self-loop at {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValidationError(f"duplicate edge {key}")
            seen.add(key)
            if not w > 0:
                raise ValidationError("edge weights must be positive")

    def adjacency(self) -> csr_matrix:
        if not self.edges:
            return csr_matrix((self.n, self.n))
        u, v, w = (np.array(col) for col in zip(*self.edges))
        return csr_matrix((np.concatenate([w, w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
                          shape=(self.n, self.n))


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Finite metric given by a symmetric distance table."""

    dist: np.ndarray
    validate: bool = True

    def __post_init__(self):
        d = np.array(self.dist, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValidationError("distance table must be square")
        object.__setattr__(self, "dist", _readonly(d))
        if self.validate:
            check_metric(d)

    @property
    def n(self) -> int:
        return int(self.dist.shape[0])

    def restrict(self, points) -> "FiniteMetricSpace":
        idx = np.asarray(points, dtype=np.int64)
        return FiniteMetricSpace(self.dist[np.ix_(idx, idx)], validate=False)


def check_metric(d: np.ndarray, tol: float = TRIANGLE_TOL) -> None:
    if np.any(np.diag(d) != 0):
        raise ValidationError("nonzero diagonal")
    if not np.array_equal(d, d.T):
        raise ValidationError("distance table is not symmetric")
    off = ~np.eye(d.shape[0], dtype=bool)
    if np.any(~(d[off] > 0)):
        raise ValidationError("off-diagonal distances must be positive")
    witness = kernels.triangle_violation(d, tol)
    if witness is not None:
        i, j, k = witness
        raise ValidationError(f"triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def _tree_from_bfs_parents(parent, weight):
    return WeightedRootedTree(np.asarray(parent, dtype=np.int64), np.asarray(weight, dtype=np.float64), 0)


def complete_tree_size(b: int, h: int) -> int:
    if b == 1:
        return h + 1
    return (b ** (h + 1) - 1) // (b - 1)


def make_complete_tree(b: int, h: int) -> WeightedRootedTree:
    """Complete ``b``-ary tree of height ``h`` with unit weights, BFS ids."""
    if b < 1 or h < 0:
        raise ValueError("need b >= 1 and h >= 0")
    n = complete_tree_size(b, h)
    if n > INT_LIMIT:
        raise SizeError(f"complete tree with b={b}, h={h} has {n} vertices")
    parent = np.empty(n, dtype=np.int64)
    parent[0] = -1
    parent[1:] = (np.arange(1, n) - 1) // b
    weight = np.ones(n)
    weight[0] = 0.0
    return _tree_from_bfs_parents(parent, weight)


def make_umbel(b: int) -> WeightedRootedTree:
    """Root 0, center 1, tips 2..b+1; root -- center -- tip_i."""
    if b < 1:
        raise ValueError("umbel needs at least one tip")
    parent = np.array([-1, 0] + [1] * b, dtype=np.int64)
    weight = np.ones(b + 2)
    weight[0] = 0.0
    return _tree_from_bfs_parents(parent, weight)


def make_geometric_binary(H: int) -> WeightedRootedTree:
    """Complete binary tree of height H; an edge into depth n weighs 2**-n."""
    if H < 1:
        raise ValueError("height must be >= 1")
    if H > GEOMETRIC_MAX_HEIGHT:
        raise SizeError(f"height {H} exceeds {GEOMETRIC_MAX_HEIGHT}")
    tree = make_complete_tree(2, H)
    weight = np.ldexp(1.0, -tree.depth.astype(np.int32))
    weight[0] = 0.0
    return WeightedRootedTree(tree.parent, weight, 0)


def make_random_tree(n: int, weight_low: float, weight_high: float, seed: int) -> WeightedRootedTree:
    """Random recursive tree: vertex i attaches to a uniform parent in 0..i-1.

    Weights are log-uniform in ``[weight_low, weight_high]``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0 < weight_low <= weight_high) or not math.isfinite(weight_high):
        raise ValueError("need 0 < weight_low <= weight_high")
    rng = np.random.default_rng(np.uint64(seed % 2**64))
    parent = np.full(n, -1, dtype=np.int64)
    if n > 1:
        parent[1:] = np.floor(rng.random(n - 1) * np.arange(1, n)).astype(np.int64)
    logs = rng.uniform(math.log(weight_low), math.log(weight_high), size=n)
    weight = np.clip(np.exp(logs), weight_low, weight_high)
    weight[0] = 0.0
    return WeightedRootedTree(parent, weight, 0)


def _bfs_relabel(n, adj_order, root):
    """New ids by BFS from root, neighbours visited in insertion order."""
    new = [-1] * n
    new[root] = 0
    order = [root]
    queue = deque(order)
    while queue:
        u = queue.popleft()
        for v in adj_order[u]:
            if new[v] < 0:
                new[v] = len(order)
                order.append(v)
                queue.append(v)
    return new


def _parasol_step(prev: WeightedGraph, b: int):
    """Replace every edge of ``prev`` by a copy of the level-1 parasol.

    Returns the new graph and the new ids of the vertices of ``prev``.
    """
    dist_root = dijkstra(prev.adjacency(), indices=prev.marks["r"])
    n = prev.n
    edges = []
    for u, v, _ in prev.edges:
        if dist_root[u] == dist_root[v]:
            raise ValidationError("parasol edge with endpoints equidistant from the root")
        top, bottom = (u, v) if dist_root[u] < dist_root[v] else (v, u)
        center = n
        tips = list(range(n + 1, n + 1 + b))
        n += b + 1
        edges.append((top, center))
        edges.extend((center, t) for t in tips)
        edges.extend((t, bottom) for t in tips)
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    new = _bfs_relabel(n, adj, prev.marks["r"])
    graph = WeightedGraph(
        n=n,
        edges=tuple((new[u], new[v], 1.0) for u, v in edges),
        marks={"r": new[prev.marks["r"]], "s": new[prev.marks["s"]]},
    )
    return graph, [new[v] for v in range(prev.n)]


def parasol_levels(b: int, levels: int):
    """Yield (graph, ids of the previous level's vertices) for levels 1..levels."""
    if b < 1 or levels < 1:
        raise ValueError("need b >= 1 and levels >= 1")
    # level 1: r=0, center=1, tips=2..b+1, s=b+2 (already BFS order)
    tips = range(2, b + 2)
    edges = [(0, 1, 1.0)] + [(1, t, 1.0) for t in tips] + [(t, b + 2, 1.0) for t in tips]
    graph = WeightedGraph(n=b + 3, edges=tuple(edges), marks={"r": 0, "s": b + 2})
    yield graph, [0, b + 2]
    for _ in range(levels - 1):
        nv = graph.n + len(graph.edges) * (b + 1)
        if nv > INT_LIMIT:
            raise SizeError("parasol too large")
        graph, skeleton = _parasol_step(graph, b)
        yield graph, skeleton


def make_parasol(b: int, levels: int) -> WeightedGraph:
    graph = None
    for graph, _ in parasol_levels(b, levels):
        pass
    return graph


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def _check_vertex(tree, v):
    if not (isinstance(v, (int, np.integer)) and 0 <= v < tree.n):
        raise ValueError(f"invalid vertex id {v!r}")


def lca(tree: WeightedRootedTree, x: int, y: int) -> int:
    _check_vertex(tree, x)
    _check_vertex(tree, y)
    depth, parent = tree.depth, tree.parent
    while depth[x] > depth[y]:
        x = parent[x]
    while depth[y] > depth[x]:
        y = parent[y]
    while x != y:
        x, y = parent[x], parent[y]
    return int(x)


def _path_up(tree, x, top):
    """Vertices from x up to (excluding) its ancestor top."""
    path = []
    while x != top:
        path.append(x)
        x = tree.parent[x]
    return path


def _sum_down(tree, path):
    # accumulate from the ancestor end downward; kernels use the same order
    s = 0.0
    for v in reversed(path):
        s = s + tree.weight[v]
    return s


def tree_distance(tree: WeightedRootedTree, x: int, y: int) -> float:
    a = lca(tree, x, y)
    return float(_sum_down(tree, _path_up(tree, x, a)) + _sum_down(tree, _path_up(tree, y, a)))


def tree_path_edges(tree: WeightedRootedTree, x: int, y: int) -> list[int]:
    """Lower endpoints of the edges on the x--y path."""
    a = lca(tree, x, y)
    return _path_up(tree, x, a) + _path_up(tree, y, a)


def tree_distance_matrix(tree: WeightedRootedTree) -> np.ndarray:
    tin, tout = tree.preorder
    return kernels.tree_distance_matrix(tree.parent, tree.weight, tree.depth, tin, tout)


def metric_of(obj) -> FiniteMetricSpace:
    """All-pairs shortest-path metric of a tree or a connected weighted graph."""
    if isinstance(obj, WeightedRootedTree):
        d = tree_distance_matrix(obj)
    elif isinstance(obj, WeightedGraph):
        adj = obj.adjacency()
        ncomp, _ = connected_components(adj, directed=False)
        if ncomp != 1:
            raise ConnectivityError(f"graph has {ncomp} connected components")
        d = dijkstra(adj, directed=False)
    else:
        raise TypeError(f"cannot build a metric from {type(obj).__name__}")
    return FiniteMetricSpace(d, validate=False)


def tree_to_graph(tree: WeightedRootedTree) -> WeightedGraph:
    return WeightedGraph(n=tree.n, edges=tuple(tree.edges()), marks={"r": tree.root})
