"""SR-CR achievable regions: ISAC time-sharing versus FDSAC bandwidth split.

A region is stored as its upper-right (Pareto) boundary; the region itself
is the lower-left closure of that polyline.
"""
import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import StructuralError
from .model import C_SIC, FDSAC, S_SIC
from .montecarlo import ecr_curves, fdsac_ecr_sweep
from .sensing import fdsac_sensing_rate, max_sensing_rate

ISAC = "ISAC"


@dataclass(frozen=True)
class RatePoint:
    sr: float
    cr: float
    cr_ci95: float = 0.0


@dataclass(frozen=True)
class RegionBoundary:
    points: np.ndarray  # (n, 2): sr, cr
    label: str
    params: np.ndarray
    cr_ci95: np.ndarray

    @property
    def sr(self):
        return self.points[:, 0]

    @property
    def cr(self):
        return self.points[:, 1]


def _check_grid(grid, name):
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(g < 0) or np.any(g > 1):
        raise StructuralError(f"{name} grid must be a non-empty vector within [0, 1]")
    return g


def isac_corners(cfg, trials, seed, workers=1):
    """Operating points ``(S-SIC corner, C-SIC corner)`` at cfg's powers.

    Both ergodic rates come from the same channel draws.
    """
    if cfg.p_c > 0:
        ecr = ecr_curves(cfg, [10 * math.log10(cfg.p_c)], trials, seed,
                         schemes=(S_SIC, C_SIC), workers=workers)
    corners = []
    for order in (S_SIC, C_SIC):
        sr = max_sensing_rate(cfg, order)
        if cfg.p_c > 0:
            e = ecr[order][0]
            corners.append(RatePoint(sr, e.point, e.half_width_95))
        else:
            corners.append(RatePoint(sr, 0.0, 0.0))
    return tuple(corners)


def isac_boundary(cfg, p_grid, trials, seed, workers=1):
    """Time-sharing segment: S-SIC with probability p, C-SIC otherwise."""
    p = _check_grid(p_grid, "p")
    s_corner, c_corner = isac_corners(cfg, trials, seed, workers)
    sr = p * s_corner.sr + (1 - p) * c_corner.sr
    cr = p * s_corner.cr + (1 - p) * c_corner.cr
    ci = p * s_corner.cr_ci95 + (1 - p) * c_corner.cr_ci95
    # grid endpoints reproduce the corners exactly
    sr[p == 1.0], cr[p == 1.0] = s_corner.sr, s_corner.cr
    sr[p == 0.0], cr[p == 0.0] = c_corner.sr, c_corner.cr
    return RegionBoundary(np.column_stack([sr, cr]), ISAC, p, ci)


def fdsac_boundary(cfg, alpha_grid, trials, seed, workers=1):
    """Bandwidth sweep: fraction alpha to communications, 1 - alpha to sensing.

    All alpha values share one set of channel draws.
    """
    alphas = _check_grid(alpha_grid, "alpha")
    sr = np.array([fdsac_sensing_rate(cfg, a) for a in alphas])
    cr = np.zeros_like(alphas)
    ci = np.zeros_like(alphas)
    if cfg.p_c > 0:
        for i, e in enumerate(fdsac_ecr_sweep(cfg, alphas, trials, seed, workers)):
            cr[i], ci[i] = e.point, e.half_width_95
    return RegionBoundary(np.column_stack([sr, cr]), FDSAC, alphas, ci)


def _segment_margin(p0, p1, q):
    # max over t in [0, 1] of min(a(t), b(t)) with a, b affine in t
    a0, b0 = p0[0] - q[0], p0[1] - q[1]
    da, db = p1[0] - p0[0], p1[1] - p0[1]
    best = max(min(a0, b0), min(a0 + da, b0 + db))
    if da != db:
        t = (b0 - a0) / (da - db)
        if 0.0 < t < 1.0:
            best = max(best, a0 + t * da)
    return best


def region_margin(point, outer):
    """Largest ``min(sr_slack, cr_slack)`` of `point` against `outer`'s boundary.

    Negative means the point lies outside the outer region.
    """
    pts = outer.points
    q = np.asarray(point, dtype=float)
    if len(pts) == 1:
        return float(min(pts[0, 0] - q[0], pts[0, 1] - q[1]))
    return float(max(_segment_margin(pts[i], pts[i + 1], q) for i in range(len(pts) - 1)))


def containment_check(inner, outer, rel_tol=1e-6):
    """Is every boundary point of `inner` inside `outer`?

    Returns ``(contained, worst_margin)``. Margins down to
    ``-rel_tol * diag(outer)`` count as contained, with ``diag`` the
    length of the outer region's bounding-box diagonal.
    """
    if len(inner.points) == 0 or len(outer.points) == 0:
        raise StructuralError("boundaries must be non-empty")
    worst = min(region_margin(p, outer) for p in inner.points)
    scale = math.hypot(outer.sr.max(), outer.cr.max())
    return worst >= -rel_tol * scale, worst


def write_region_csv(path, boundaries):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["boundary", "param", "sr_bits", "cr_bits", "cr_ci95"])
        for b in boundaries:
            for prm, (sr, cr), ci in zip(b.params, b.points, b.cr_ci95):
                w.writerow([b.label, f"{prm:.17g}", f"{sr:.17g}", f"{cr:.17g}", f"{ci:.17g}"])
