"""End-to-end: colour a tree, embed it, measure the distortion against the bounds."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coloring import EdgeColoring, best_delta, caterpillar_number, kappa_achieved, optimal_caterpillar_coloring
from .distortion import DistortionReport, PointMap, distortion
from .embedding import LIP_INVERSE_BOUND, asserted_lip_bound, embed_tree, lip_bound
from .graphs import FiniteMetricSpace, WeightedRootedTree, tree_distance_matrix

BOUND_TOL = 1e-9


@dataclass
class EmbeddingReport:
    kappa: int
    kappa_achieved: int
    lip: float
    lip_inv: float
    bound_lip: float
    bound_lip_natural: float
    delta_best: float | None = None
    report: DistortionReport | None = None

    @property
    def dist(self) -> float:
        return self.lip * self.lip_inv

    @property
    def within_bounds(self) -> bool:
        return (self.lip_inv <= LIP_INVERSE_BOUND + BOUND_TOL
                and self.lip <= max(self.bound_lip, self.bound_lip_natural) * (1 + BOUND_TOL))

    def to_json(self) -> dict:
        out = {
            "kappa": self.kappa,
            "kappa_achieved": self.kappa_achieved,
            "delta_best": self.delta_best,
            "lip": self.lip,
            "lip_inv": self.lip_inv,
            "dist": self.dist,
            "bound_lip": self.bound_lip,
            "bound_lip_natural_log": self.bound_lip_natural,
            "bound_lip_inv": LIP_INVERSE_BOUND,
            "within_bounds": self.within_bounds,
        }
        if self.report is not None:
            out["witnesses"] = {k: list(v) for k, v in self.report.witnesses.items()}
        return out


def embedding_map(tree: WeightedRootedTree, coloring: EdgeColoring, p: float, rho=None) -> PointMap:
    points = embed_tree(tree, coloring, p)
    rho = tree_distance_matrix(tree) if rho is None else rho
    source = FiniteMetricSpace(rho, validate=False)
    target = FiniteMetricSpace(points.pairwise(), validate=False)
    return PointMap(source, target, np.arange(tree.n))


def embedding_report(tree: WeightedRootedTree, coloring: EdgeColoring, p: float, rho=None,
                     with_delta: bool = False) -> EmbeddingReport:
    rho = tree_distance_matrix(tree) if rho is None else rho
    kappa = kappa_achieved(coloring)
    if tree.n < 2:
        rep = DistortionReport(1.0, 1.0)
    else:
        rep = distortion(embedding_map(tree, coloring, p, rho))
    delta = best_delta(coloring, rho) if (with_delta and tree.n > 1) else None
    return EmbeddingReport(
        kappa=caterpillar_number(tree),
        kappa_achieved=kappa,
        lip=rep.lip,
        lip_inv=rep.lip_inverse,
        bound_lip=lip_bound(kappa, p, "2"),
        bound_lip_natural=lip_bound(kappa, p, "e"),
        delta_best=delta,
        report=rep,
    )


def run_pipeline(tree: WeightedRootedTree, p: float) -> EmbeddingReport:
    """caterpillar number -> optimal colouring -> embedding -> distortion."""
    return embedding_report(tree, optimal_caterpillar_coloring(tree), p, with_delta=True)


__all__ = ["EmbeddingReport", "embedding_map", "embedding_report", "run_pipeline", "asserted_lip_bound"]
