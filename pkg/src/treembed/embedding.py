"""Caterpillar-colouring embedding of a weighted tree into lp(colours).

A vertex x whose root path meets classes c_1..c_m with weights l_1..l_m is
sent to

    f(x) = sum_i l_i**(1/p) * s_i**((p-1)/p) * e_{c_i},
    s_i  = sum_{j>=i} max(l_j - l_i / (2*kappa), 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .coloring import EdgeColoring, kappa_achieved
from .errors import ValidationError

LIP_INVERSE_BOUND = 96.0


@dataclass(frozen=True)
class VertexProfile:
    colors: tuple
    lengths: tuple

    @property
    def m(self) -> int:
        return len(self.colors)


@dataclass(frozen=True, eq=False)
class EmbeddedPointSet:
    """Sparse images of the vertices, stored aligned with the colour profiles.

    ``colors[v, i]``/``values[v, i]`` is one nonzero coordinate of f(v);
    entries with colour -1 are padding.
    """

    p: float
    colors: np.ndarray
    values: np.ndarray

    @property
    def n(self) -> int:
        return int(self.colors.shape[0])

    def coords(self, v: int) -> dict:
        keep = self.colors[v] >= 0
        return {int(c): float(x) for c, x in zip(self.colors[v][keep], self.values[v][keep])}

    def pairwise(self) -> np.ndarray:
        return kernels.lp_pairwise(self.colors, self.values, self.p)

    def jsonl_records(self):
        for v in range(self.n):
            yield {"v": v, "coords": [[c, x] for c, x in self.coords(v).items()]}


def _require_monotone(coloring):
    if not isinstance(coloring, EdgeColoring):
        raise ValidationError("expected a validated EdgeColoring")


def profile(tree, coloring: EdgeColoring, x: int) -> VertexProfile:
    """Classes met on the root--x path, in order, with accumulated weights."""
    _require_monotone(coloring)
    if coloring.tree is not tree:
        raise ValueError("colouring belongs to a different tree")
    colors, lengths, m = coloring.profiles
    k = int(m[x])
    return VertexProfile(tuple(int(c) for c in colors[x, :k]), tuple(float(v) for v in lengths[x, :k]))


def s_values(entry: VertexProfile, kappa: int) -> list[float]:
    if kappa < 1 or kappa < entry.m:
        raise ValueError(f"kappa={kappa} is smaller than the profile length {entry.m}")
    ls = entry.lengths
    out = []
    for i, li in enumerate(ls):
        cut = li / (2 * kappa)
        s = 0.0
        for lj in ls[i:]:
            s += max(lj - cut, 0.0)
        out.append(s)
    return out


def s_matrix(lengths: np.ndarray, kappa: int) -> np.ndarray:
    """s_i for every row of a padded length matrix (padding gives 0)."""
    n, K = lengths.shape
    s = np.zeros((n, K))
    for i in range(K):
        cut = lengths[:, i] / (2 * kappa)
        for j in range(i, K):
            s[:, i] += np.maximum(lengths[:, j] - cut, 0.0)
    return s


def embed_tree(tree, coloring: EdgeColoring, p: float, kappa: int | None = None) -> EmbeddedPointSet:
    """Embed ``tree`` into lp indexed by the colour classes of ``coloring``.

    ``kappa`` defaults to the number of classes the colouring achieves on its
    worst root-leaf path.
    """
    if not (1 < p < math.inf):
        raise ValueError(f"p must lie in (1, inf), got {p}")
    _require_monotone(coloring)
    colors, lengths, m = coloring.profiles
    if kappa is None:
        kappa = max(kappa_achieved(coloring), 1)
    elif kappa < int(m.max()):
        raise ValueError("kappa override is smaller than the achieved kappa")
    s = s_matrix(lengths, kappa)
    values = lengths ** (1.0 / p) * s ** ((p - 1.0) / p)
    values[colors < 0] = 0.0
    values.setflags(write=False)
    return EmbeddedPointSet(float(p), colors, values)


def lp_distance(points: EmbeddedPointSet, x: int, y: int, p: float) -> float:
    if p != points.p:
        raise ValueError(f"point set uses p={points.p}, got p={p}")
    fx, fy = points.coords(x), points.coords(y)
    total = 0.0
    for c in sorted(fx.keys() | fy.keys()):
        total += abs(fx.get(c, 0.0) - fy.get(c, 0.0)) ** p
    return total ** (1.0 / p)


def lip_bound(kappa: int, p: float, base: str = "2") -> float:
    """Upper bound on Lip(f): (6 log(2 kappa))**(1/p), log base 2 or e."""
    log = math.log2 if base == "2" else math.log
    return (6.0 * log(2.0 * max(kappa, 1))) ** (1.0 / p)


def asserted_lip_bound(kappa: int, p: float) -> float:
    return max(lip_bound(kappa, p, "2"), lip_bound(kappa, p, "e"))
