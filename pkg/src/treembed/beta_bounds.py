"""Power-type (beta) moduli, bending bounds and distortion lower bounds.

The modulus is modelled by its power-type lower bound ``gamma * t**p`` on
``[0, a]``.  Logarithms in the tree bound are base 2: halving the height k
times needs ``2**k <= h``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .errors import DomainError

BISECTION_TOL = 1e-10


@dataclass(frozen=True)
class BetaModulus:
    gamma: float
    p: float
    a: float | None = None

    def __post_init__(self):
        if not self.p > 1 or math.isinf(self.p):
            raise DomainError(f"p must lie in (1, inf), got {self.p}")
        if self.gamma < 0:
            raise DomainError("gamma must be nonnegative")
        a = self.a
        if a is None:
            # largest endpoint in (0, 2] keeping gamma * a**p <= 1
            a = 2.0 if self.gamma == 0 else min(2.0, self.gamma ** (-1.0 / self.p))
        if not 0 < a <= 2:
            raise DomainError(f"domain endpoint a={a} outside (0, 2]")
        if self.gamma * a ** self.p > 1 + 1e-12:
            raise DomainError(f"gamma * a**p = {self.gamma * a ** self.p} exceeds 1")
        object.__setattr__(self, "a", float(a))

    @property
    def min_distortion(self) -> float:
        """Smallest D for which beta(2/D) is defined."""
        return max(1.0, 2.0 / self.a)


def beta_value(mod: BetaModulus, t: float) -> float:
    if not 0 <= t <= mod.a * (1 + 1e-15):
        raise DomainError(f"t={t} outside [0, {mod.a}]")
    return min(mod.gamma * t ** mod.p, 1.0)


def _check_dist(dist, mod):
    if dist < 1:
        raise DomainError(f"distortion {dist} < 1")
    if 2.0 / dist > mod.a * (1 + 1e-15):
        raise DomainError(f"2/D = {2.0 / dist} exceeds the domain endpoint {mod.a}")


def umbel_bending_bound(lip: float, dist: float, mod: BetaModulus) -> float:
    """Upper bound on |f(r) - f(t_i)| for some tip of an embedded umbel."""
    _check_dist(dist, mod)
    return 2.0 * lip * (1.0 - beta_value(mod, 2.0 / dist))


def parasol_bending_bound(lip: float, dist: float, mod: BetaModulus) -> float:
    """Upper bound on |f(r) - f(s)| for an embedded level-1 parasol."""
    _check_dist(dist, mod)
    return 3.0 * lip * (1.0 - 2.0 / 3.0 * beta_value(mod, 2.0 / dist))


def improve_tree(D: float, mod: BetaModulus) -> float:
    """Distortion achievable on half the height given distortion D."""
    _check_dist(D, mod)
    return D * (1.0 - beta_value(mod, 2.0 / D))


def improve_parasol(D: float, mod: BetaModulus) -> float:
    _check_dist(D, mod)
    return D * (1.0 - 2.0 / 3.0 * beta_value(mod, 2.0 / D))


def tree_lower_bound_flagged(h: float, mod: BetaModulus) -> tuple[float, bool]:
    """(bound, valid); heights below 2 give (0.0, False)."""
    if h < 2:
        return 0.0, False
    return 2.0 * mod.gamma ** (1.0 / mod.p) * math.log2(h / 2.0) ** (1.0 / mod.p), True


def tree_lower_bound(h: float, mod: BetaModulus) -> float:
    return tree_lower_bound_flagged(h, mod)[0]


def parasol_lower_bound(levels: int, mod: BetaModulus) -> float:
    if levels < 1:
        raise ValueError("levels must be >= 1")
    return 2.0 * (2.0 * mod.gamma / 3.0) ** (1.0 / mod.p) * levels ** (1.0 / mod.p)


def _log2_exact(h: int) -> int:
    if not isinstance(h, int) or h < 1 or h & (h - 1):
        raise ValueError(f"h={h} is not a power of two")
    return h.bit_length() - 1


def _survives(D: float, k: int, mod: BetaModulus, seed: float) -> bool:
    """Whether k halvings starting from distortion D stay consistent."""
    floor = mod.min_distortion
    for _ in range(k):
        if D < floor:
            return False
        D = improve_tree(D, mod)
    return D >= seed


def recursion_lower_bound(h: int, mod: BetaModulus, seed: float = 1.0) -> float:
    """Smallest D surviving log2(h) applications of :func:`improve_tree`.

    Any embedding of the height-h tree with smaller distortion would, after
    repeated halving, give a height-1 embedding below ``seed``.
    """
    k = _log2_exact(h)
    if k == 0:
        return seed
    lo = seed
    if _survives(lo, k, mod, seed):
        return lo
    hi = max(2.0 * lo, 2.0 * (mod.gamma * k) ** (1.0 / mod.p) + seed, mod.min_distortion)
    while not _survives(hi, k, mod, seed):
        lo, hi = hi, 2.0 * hi
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if _survives(mid, k, mod, seed):
            hi = mid
        else:
            lo = mid
    return hi


def recursion_lower_bound_floor(h: int, mod: BetaModulus) -> float:
    """Recursion bound at the largest power of two not exceeding h."""
    return recursion_lower_bound(1 << (int(h).bit_length() - 1), mod)


def upper_theoretical(h: int, p: float) -> float:
    """96 * (6 log2(2h))**(1/p): the embedding bound with kappa = h."""
    return 96.0 * (6.0 * math.log2(2.0 * h)) ** (1.0 / p)


def finite_determinacy_ratio(h: int, p: float) -> float:
    """(log2 h)**(1/p) / (log2 h)**(1/2); undefined (nan) for h = 1."""
    lg = math.log2(h)
    if lg <= 0:
        return math.nan
    return lg ** (1.0 / p) / lg ** 0.5


@dataclass
class GapRow:
    h: int
    lower_closed: float
    lower_recursion: float
    measured_dist: float
    upper_theoretical: float
    determinacy_ratio: float
    modulus_ok: bool


CSV_COLUMNS = ["h", "lower_closed", "lower_recursion", "measured_dist", "upper_theoretical", "determinacy_ratio",
               "modulus_ok"]


def gap_report(h_grid, p: float, gamma: float, b: int, measure_limit: int = 20000) -> list[GapRow]:
    """Lower bounds, measured embedding distortion and upper bounds per height.

    The embedding is measured only when the complete tree has at most
    ``measure_limit`` vertices (nan otherwise).
    """
    from .coloring import optimal_caterpillar_coloring
    from .graphs import complete_tree_size, make_complete_tree
    from .pipeline import embedding_report

    if b < 2:
        raise ValueError("branching b must be >= 2")
    mod = BetaModulus(gamma, p)
    rows = []
    for h in h_grid:
        h = int(h)
        if h < 1:
            raise ValueError("heights must be >= 1")
        closed = tree_lower_bound(h, mod)
        recursion = recursion_lower_bound_floor(h, mod)
        measured = math.nan
        if h < 64 and complete_tree_size(b, h) <= measure_limit:
            tree = make_complete_tree(b, h)
            measured = embedding_report(tree, optimal_caterpillar_coloring(tree), p).dist
        upper = upper_theoretical(h, p)
        rows.append(GapRow(h, closed, recursion, measured, upper, finite_determinacy_ratio(h, p),
                           max(closed, recursion) <= upper))
    return rows


def _fmt(x):
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return "" if math.isnan(x) else repr(float(x))


def rows_to_csv(rows: list[GapRow], header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()
