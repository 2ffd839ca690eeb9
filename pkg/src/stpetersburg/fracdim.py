"""Box-counting dimension estimates and the sojourn-time experiment."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .game import FAIR, SampledPath, simulate_partial_sums, x_path_approx, y_path_approx

log = logging.getLogger(__name__)


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[1] not in (1, 2) or len(pts) == 0:
        raise ValueError("need a non-empty set of 1-d or 2-d points")
    return pts


def box_count(points, delta: float) -> int:
    """Number of grid cells ``[i delta, (i+1) delta)`` (per axis) hit by ``points``."""
    pts = _as_points(points)
    if delta <= 0:
        raise ValueError("delta must be positive")
    cells = np.floor(pts / delta).astype(np.int64)
    if cells.shape[1] == 1:
        return int(len(np.unique(cells[:, 0])))
    cells -= cells.min(axis=0)
    span = int(cells[:, 1].max()) + 1
    if (int(cells[:, 0].max()) + 1) * span >= 2**63:
        return int(len(np.unique(cells, axis=0)))
    return int(len(np.unique(cells[:, 0] * span + cells[:, 1])))


@dataclass(frozen=True)
class BoxCountReport:
    j: np.ndarray = field(repr=False)
    scales: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    slope: float
    intercept: float
    r_squared: float
    slope_stderr: float

    def refit(self, j_min: int, j_max: int) -> "BoxCountReport":
        sel = (self.j >= j_min) & (self.j <= j_max)
        return _fit(self.j[sel], self.counts[sel])


def _fit(j: np.ndarray, counts: np.ndarray) -> BoxCountReport:
    if len(j) < 2:
        raise ValueError("need at least two scales")
    if np.all(counts == counts[0]):
        raise ValueError("degenerate fit: all box counts are equal")
    y = np.log2(counts.astype(np.float64))
    x = j.astype(np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot
    dof = len(x) - 2
    if dof > 0:
        stderr = math.sqrt(ss_res / dof / float(((x - x.mean()) ** 2).sum()))
    else:
        stderr = 0.0
    return BoxCountReport(j, np.exp2(-x), counts, float(slope), float(intercept), r2, stderr)


def box_dimension_estimate(points, j_min: int = 4, j_max: int = 10) -> BoxCountReport:
    """Least-squares slope of ``log2 N(2**-j)`` against ``j`` on ``[j_min, j_max]``."""
    if not 0 <= j_min < j_max:
        raise ValueError("need 0 <= j_min < j_max")
    pts = _as_points(points)
    if len(pts) < 2 ** (2 * j_max):
        log.warning("only %d points for j_max=%d; fine-scale counts may be biased low",
                    len(pts), j_max)
    j = np.arange(j_min, j_max + 1)
    counts = np.array([box_count(pts, 2.0 ** -int(k)) for k in j], dtype=np.int64)
    return _fit(j, counts)


def log_corrected_slope(report: BoxCountReport) -> float:
    """Slope of ``log2(N / j)`` against ``j``.

    Diagnostic for sets with ``N(2**-j) ~ j 2**(d j)``, where the plain fit over a
    finite window overshoots ``d`` by roughly ``1/(j ln 2)``.
    """
    y = np.log2(report.counts / report.j.astype(np.float64))
    return float(np.polyfit(report.j.astype(np.float64), y, 1)[0])


def range_points(path: SampledPath) -> np.ndarray:
    if not len(path):
        raise ValueError("empty path")
    return np.asarray(path.v)


def graph_points(path: SampledPath) -> np.ndarray:
    if not len(path):
        raise ValueError("empty path")
    return path.points


def sojourn_time(path: SampledPath, a: float) -> float:
    """``dt * #{k : |(t_k, v_k)| <= a}`` for a uniformly spaced path."""
    t = np.asarray(path.t)
    if len(t) > 1:
        dt = np.diff(t)
        if not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
            raise ValueError("path spacing is not uniform")
        step = float(dt[0])
    else:
        step = float(t[0])
    if a <= 0:
        return 0.0
    inside = np.hypot(t, path.v) <= a
    return step * int(inside.sum())


@dataclass(frozen=True)
class SojournEstimate:
    a: float
    s: float
    mean_time: float
    replicas: int
    std_error: float

    @property
    def ratio(self) -> float:
        return self.mean_time / self.a


def sojourn_bound_experiment(m: int, replicas: int, a_grid: Sequence[float],
                             seed: int) -> list[SojournEstimate]:
    """Monte-Carlo ``E[T(a, 1)]`` for ``Z(t) = (t, X(t))`` from full x-paths at level ``m``."""
    a_grid = np.asarray(a_grid, dtype=np.float64)
    if np.any(a_grid <= 0) or np.any(a_grid > 1):
        raise ValueError("radii must lie in (0, 1]")
    times = np.empty((replicas, len(a_grid)))
    for i in range(replicas):
        path = x_path_approx(simulate_partial_sums(1 << m, FAIR, seed, replica=i), m, full=True)
        norm = np.sort(np.hypot(path.t, path.v))
        dt = float(path.t[1] - path.t[0])
        times[i] = dt * np.searchsorted(norm, a_grid, side="right")
    mean = times.mean(axis=0)
    se = times.std(axis=0, ddof=1) / math.sqrt(replicas) if replicas > 1 else np.zeros(len(a_grid))
    return [SojournEstimate(float(a), 1.0, float(mu), replicas, float(e))
            for a, mu, e in zip(a_grid, mean, se)]


def path_dimension_slopes(m: int, seeds: Sequence[int], kind: str = "graph",
                          j_min: int = 4, j_max: int = 10) -> list[BoxCountReport]:
    """Box-dimension fits of Y block paths at level ``m``, one per seed."""
    reports = []
    for seed in seeds:
        path = y_path_approx(simulate_partial_sums(1 << m, FAIR, seed), m)
        pts = graph_points(path) if kind == "graph" else range_points(path)
        reports.append(box_dimension_estimate(pts, j_min, j_max))
    return reports
