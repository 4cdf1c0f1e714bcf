"""Lipschitz, co-Lipschitz and distortion constants of maps between finite metrics."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import InjectivityError, StructureError, SurjectivityError
from .graphs import FiniteMetricSpace, WeightedRootedTree, tree_distance_matrix

STRUCTURE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PointMap:
    source: FiniteMetricSpace
    target: FiniteMetricSpace
    assign: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.assign, dtype=np.int64).copy()
        if a.shape != (self.source.n,):
            raise ValueError("assignment must give one target point per source point")
        if a.size and (a.min() < 0 or a.max() >= self.target.n):
            raise ValueError("assignment refers to a missing target point")
        a.setflags(write=False)
        object.__setattr__(self, "assign", a)

    def image_distances(self) -> np.ndarray:
        return self.target.dist[np.ix_(self.assign, self.assign)]

    @property
    def injective(self) -> bool:
        return np.unique(self.assign).size == self.assign.size

    @property
    def surjective(self) -> bool:
        return np.unique(self.assign).size == self.target.n

    def fibers(self) -> list[np.ndarray]:
        order = np.argsort(self.assign, kind="stable")
        bounds = np.searchsorted(self.assign[order], np.arange(self.target.n + 1))
        return [order[bounds[t]:bounds[t + 1]] for t in range(self.target.n)]


@dataclass
class DistortionReport:
    lip: float
    lip_inverse: float = float("nan")
    colip: float = float("nan")
    witnesses: dict = field(default_factory=dict)

    @property
    def dist(self) -> float:
        return self.lip * self.lip_inverse

    @property
    def codist(self) -> float:
        return self.lip * self.colip

    def to_json(self) -> dict:
        out = {"lip": self.lip}
        for key in ("lip_inverse", "colip"):
            if not np.isnan(getattr(self, key)):
                out[key] = getattr(self, key)
        if not np.isnan(self.lip_inverse):
            out["dist"] = self.dist
        if not np.isnan(self.colip):
            out["codist"] = self.codist
        out["witnesses"] = {k: list(v) for k, v in self.witnesses.items()}
        return out


def lipschitz_witness(fmap: PointMap):
    """(Lip(f), pair attaining it); (0.0, None) when the source has < 2 points."""
    if fmap.source.n < 2:
        return 0.0, None
    value, i, j = kernels.max_ratio(fmap.image_distances(), fmap.source.dist)
    return value, (i, j)


def lipschitz(fmap: PointMap) -> float:
    return lipschitz_witness(fmap)[0]


def distortion(fmap: PointMap) -> DistortionReport:
    if not fmap.injective:
        raise InjectivityError("map identifies distinct source points")
    if fmap.source.n < 2:
        return DistortionReport(0.0, 0.0)
    img = fmap.image_distances()
    lip, i, j = kernels.max_ratio(img, fmap.source.dist)
    inv, k, l = kernels.max_ratio(fmap.source.dist, img)
    return DistortionReport(lip, inv, witnesses={"lip": (i, j), "lip_inverse": (k, l)})


def fiber_distances(fmap: PointMap) -> np.ndarray:
    """out[x, t] = distance from source point x to the fibre over target t."""
    out = np.empty((fmap.source.n, fmap.target.n))
    for t, fib in enumerate(fmap.fibers()):
        out[:, t] = fmap.source.dist[:, fib].min(axis=1)
    return out


def colipschitz_witness(fmap: PointMap):
    """Finite-space coLip: max over x and t != f(x) of d(x, f^-1(t)) / d(f(x), t)."""
    if not fmap.surjective:
        raise SurjectivityError("map misses some target points")
    if fmap.target.n < 2:
        return 0.0, None
    near = fiber_distances(fmap)
    base = fmap.target.dist[fmap.assign]
    own = fmap.assign[:, None] == np.arange(fmap.target.n)[None, :]
    ratio = np.where(own, -1.0, near / np.where(own, 1.0, base))
    x, t = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    return float(ratio[x, t]), (int(x), int(t))


def colipschitz(fmap: PointMap) -> float:
    return colipschitz_witness(fmap)[0]


def colipschitz_ball_oracle(fmap: PointMap) -> Fraction:
    """Smallest C with B(f(x), r/C) inside f(B(x, r)) for all x, r; exact arithmetic.

    Only C among the ratios d(x, z) / d(f(x), f(z)) need testing, and for a
    given C only radii at which the left ball gains a point.
    """
    if not fmap.surjective:
        raise SurjectivityError("map misses some target points")
    dx = [[Fraction(float(v)) for v in row] for row in fmap.source.dist]
    dy = [[Fraction(float(v)) for v in row] for row in fmap.target.dist]
    f = [int(a) for a in fmap.assign]
    ns, nt = len(f), len(dy)
    candidates = sorted({dx[x][z] / dy[f[x]][f[z]] for x in range(ns) for z in range(ns) if f[x] != f[z]})

    def holds(C):
        for x in range(ns):
            radii = {C * dy[f[x]][t] for t in range(nt) if t != f[x]}
            for r in radii:
                left = {t for t in range(nt) if dy[f[x]][t] <= r / C}
                right = {f[z] for z in range(ns) if dx[x][z] <= r}
                if not left <= right:
                    return False
        return True

    for C in candidates:
        if holds(C):
            return C
    return Fraction(0)


def codistortion(fmap: PointMap) -> DistortionReport:
    lip, lw = lipschitz_witness(fmap)
    colip, cw = colipschitz_witness(fmap)
    return DistortionReport(lip, colip=colip, witnesses={"lip": lw, "colip": cw})


def inverse_quotient(embedding: PointMap) -> PointMap:
    """e^-1 as a surjection from the image e(X) onto X."""
    if not embedding.injective:
        raise InjectivityError("embedding is not injective")
    image = embedding.target.restrict(embedding.assign)
    return PointMap(image, embedding.source, np.arange(embedding.source.n))


def _check_tree_target(fmap: PointMap, tree: WeightedRootedTree):
    if fmap.target.n != tree.n:
        raise StructureError("target size differs from the tree's vertex count")
    if not np.allclose(fmap.target.dist, tree_distance_matrix(tree), rtol=STRUCTURE_TOL, atol=STRUCTURE_TOL):
        raise StructureError("target metric is not the metric of the given tree")


def lift_tree_quotient(fmap: PointMap, tree: WeightedRootedTree) -> PointMap:
    """Injective section g: T -> Z of a quotient map f: Z -> T onto a tree.

    Vertices are lifted in BFS order, each to the point of its fibre nearest
    to its parent's lift (ties to the lowest id); dist(g) <= codist(f).
    """
    _check_tree_target(fmap, tree)
    if not fmap.surjective:
        raise SurjectivityError("map misses some tree vertices")
    fibers = fmap.fibers()
    lift = np.empty(tree.n, dtype=np.int64)
    lift[tree.root] = fibers[tree.root].min()
    d = fmap.source.dist
    for v in tree.bfs_order[1:]:
        cand = np.sort(fibers[v])
        lift[v] = cand[int(np.argmin(d[lift[tree.parent[v]], cand]))]
    return PointMap(fmap.target, fmap.source, lift)


def qc_equals_c_check(tree: WeightedRootedTree, embedding: PointMap, quotient: PointMap) -> dict:
    """Both directions of qc(T) = c(T) on a concrete embedding and quotient."""
    emb = distortion(embedding)
    inv = codistortion(inverse_quotient(embedding))
    quo = codistortion(quotient)
    lifted = distortion(lift_tree_quotient(quotient, tree))
    return {
        "dist_embedding": emb.dist,
        "codist_inverse": inv.codist,
        "codist_quotient": quo.codist,
        "dist_lift": lifted.dist,
        "qc_le_c": inv.codist <= emb.dist,
        "lift_ok": lifted.dist <= quo.codist + STRUCTURE_TOL,
    }
