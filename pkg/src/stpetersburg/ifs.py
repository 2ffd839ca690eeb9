"""The two-map affine IFS whose attractor is the closure of the graph of ``f``.

Both maps share the linear part ``L = [[1/2, 0], [-1/2, 1/2]]``; the dimension
of the attractor is governed by the singular values of ``L**r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter
from scipy.spatial import cKDTree

from .game import replica_rng

L = np.array([[0.5, 0.0], [-0.5, 0.5]])
SEED_RECT = np.array([[0.5, 0.0], [1.0, 0.0], [1.0, 0.5], [0.5, 0.5]])
MAX_RECT_DEPTH = 24
BURN_IN = 64


@dataclass(frozen=True, eq=False)
class AffineMap2D:
    linear: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "linear", np.asarray(self.linear, dtype=np.float64).reshape(2, 2))
        object.__setattr__(self, "shift", np.asarray(self.shift, dtype=np.float64).reshape(2))

    def __call__(self, points):
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.linear.T + self.shift

    apply = __call__

    def after(self, inner: "AffineMap2D") -> "AffineMap2D":
        """``self o inner``."""
        return AffineMap2D(self.linear @ inner.linear, self.linear @ inner.shift + self.shift)

    def __eq__(self, other):
        if not isinstance(other, AffineMap2D):
            return NotImplemented
        return np.array_equal(self.linear, other.linear) and np.array_equal(self.shift, other.shift)

    @property
    def contraction_ratio(self) -> float:
        return singular_values(self.linear)[0]


T0 = AffineMap2D(L, [0.25, 0.5])
T1 = AffineMap2D(L, [0.5, 0.5])


def maps_t0_t1() -> tuple[AffineMap2D, AffineMap2D]:
    return T0, T1


def compose(word: str, maps=(T0, T1)) -> AffineMap2D:
    """``T_{i1} o ... o T_{ir}`` for ``word = "i1...ir"`` (``i1`` applied last)."""
    if not word:
        raise ValueError("empty word")
    result = maps[int(word[-1])]
    for ch in reversed(word[:-1]):
        result = maps[int(ch)].after(result)
    return result


def attractor_rectangles(r: int, maps=(T0, T1)) -> np.ndarray:
    """Images of the seed rectangle under all length-``r`` words.

    Returns shape ``(2**r, 4, 2)``; entry ``i`` belongs to the word whose
    binary digits (most significant first) are ``i1...ir``.
    """
    if not 1 <= r <= MAX_RECT_DEPTH:
        raise ValueError(f"depth must lie in [1, {MAX_RECT_DEPTH}]")
    quads = SEED_RECT[None, :, :]
    for _ in range(r):
        quads = np.concatenate([maps[0](quads), maps[1](quads)])
    return quads


@dataclass(frozen=True, eq=False)
class PointCloud2D:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        lo = self.points.min(axis=0)
        hi = self.points.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])


def chaos_game(n: int, seed: int, start=(0.75, 0.25)) -> PointCloud2D:
    """Random iteration of ``T0``/``T1`` with uniform choices after a 64-step burn-in.

    The orbit recursion ``x' = x/2 + c_i``, ``y' = (y + 1 - x)/2`` is a pair of
    first-order linear filters, evaluated with :func:`scipy.signal.lfilter`.
    """
    if n < 1:
        raise ValueError("need at least one point")
    choice = replica_rng(seed).integers(0, 2, size=n + BURN_IN)
    cx = np.where(choice == 0, T0.shift[0], T1.shift[0])
    x0, y0 = start
    x = lfilter([1.0], [1.0, -0.5], cx, zi=[0.5 * x0])[0]
    x_prev = np.concatenate([[x0], x[:-1]])
    y = lfilter([1.0], [1.0, -0.5], 0.5 * (1.0 - x_prev), zi=[0.5 * y0])[0]
    return PointCloud2D(np.column_stack([x, y])[BURN_IN:])


def l_power(r: int, inverse: bool = False) -> np.ndarray:
    """Closed forms ``L**r = 2**-r [[1, 0], [-r, 1]]``, ``L**-r = 2**r [[1, 0], [r, 1]]``."""
    if r < 0:
        raise ValueError("r must be non-negative; use inverse=True")
    if inverse:
        return math.ldexp(1.0, r) * np.array([[1.0, 0.0], [float(r), 1.0]])
    return math.ldexp(1.0, -r) * np.array([[1.0, 0.0], [-float(r), 1.0]])


def singular_values(m) -> tuple[float, float]:
    """Singular values of a nonsingular 2x2 matrix, largest first.

    The larger eigenvalue of ``M^T M`` comes from the quadratic formula with no
    cancellation; the smaller one from ``det(M)**2 / lambda_1``.
    """
    m = np.asarray(m, dtype=np.float64)
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    det = a * d - b * c
    if det == 0.0:
        raise ValueError("singular matrix")
    p = a * a + c * c
    s = b * b + d * d
    off = a * b + c * d
    lam1 = 0.5 * (p + s) + math.hypot(0.5 * (p - s), off)
    sigma1 = math.sqrt(lam1)
    return sigma1, abs(det) / sigma1


@dataclass(frozen=True)
class SingularPair:
    r: int
    alpha1: float
    alpha2: float


def _radicals(r):
    """``sqrt((r^2 + 2 +- sqrt(r^4 + 4 r^2)) / 2)``; the minus root in cancellation-free form."""
    r = np.asarray(r, dtype=np.float64)
    big = r * r + 2.0 + np.sqrt(r**4 + 4.0 * r * r)
    return np.sqrt(big / 2.0), np.sqrt(2.0 / big)


def singular_values_closed_form(r: int, inverse: bool = False) -> SingularPair:
    """Singular values of ``L**r`` (``alpha``) or of ``L**-r`` (``beta``)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    plus, minus = _radicals(r)
    scale = math.ldexp(1.0, r if inverse else -r)
    return SingularPair(r, scale * float(plus), scale * float(minus))


def singular_value_function(s: float, r: int, inverse: bool = False) -> float:
    """``phi^s`` of ``L**r`` (or ``L**-r``)."""
    if not 0.0 < s <= 2.0:
        raise ValueError("s must lie in (0, 2]")
    sp = singular_values_closed_form(r, inverse)
    if s <= 1.0:
        return sp.alpha1**s
    return sp.alpha1 * sp.alpha2 ** (s - 1.0)


def _log_phi(s: float, log_a1: np.ndarray, log_a2: np.ndarray) -> np.ndarray:
    if s <= 1.0:
        return s * log_a1
    return log_a1 + (s - 1.0) * log_a2


@dataclass(frozen=True)
class SeriesAudit:
    """Terms of ``sum_r n_maps**r phi^s(.)`` (or the reciprocal-phi variant)."""

    s: float
    r: np.ndarray = field(repr=False)
    alpha1: np.ndarray = field(repr=False)
    alpha2: np.ndarray = field(repr=False)
    log_terms: np.ndarray = field(repr=False)
    growth: float
    log_power: float
    converges: bool

    @property
    def terms(self) -> np.ndarray:
        return np.exp(self.log_terms)

    @property
    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.terms)

    @property
    def ratios(self) -> np.ndarray:
        return np.exp(np.diff(self.log_terms))


class SeriesSystem:
    """Linear data of an IFS with ``n_maps`` maps sharing one linear part.

    With ``linear=None`` the singular values of ``L**r`` come from their closed
    forms; otherwise powers are multiplied out and decomposed numerically.
    """

    def __init__(self, linear=None, n_maps: int = 2):
        self.linear = None if linear is None else np.asarray(linear, dtype=np.float64)
        self.n_maps = n_maps

    def log_singular_values(self, rmax: int, inverse: bool = False):
        r = np.arange(1, rmax + 1)
        if self.linear is None:
            plus, minus = _radicals(r)
            base = r * math.log(2.0) * (1 if inverse else -1)
            return r, base + np.log(plus), base + np.log(minus)
        step = np.linalg.inv(self.linear) if inverse else self.linear
        la1, la2 = np.empty(rmax), np.empty(rmax)
        power = np.eye(2)
        log_scale = 0.0
        for i in range(rmax):
            power = power @ step
            # renormalize to keep entries in range for long products
            norm = np.abs(power).max()
            power /= norm
            log_scale += math.log(norm)
            s1, s2 = singular_values(power)
            la1[i], la2[i] = log_scale + math.log(s1), log_scale + math.log(s2)
        return r, la1, la2


STEINHAUS_SYSTEM = SeriesSystem()

GROWTH_TOL = 1e-6


def series_audit(s: float, R: int, inverse: bool = False,
                 system: SeriesSystem = STEINHAUS_SYSTEM) -> SeriesAudit:
    """Terms ``n**r phi^s(L**r)`` or, with ``inverse``, ``n**r / phi^s(L**-r)``.

    Convergence is decided from the asymptotic term ratio.  The log-terms of
    the last ``R/2`` indices are fitted by ``c r + d log r + e + g/r**2``;
    ``exp(c)`` is the limiting ratio.  A ratio within ``GROWTH_TOL`` of 1 falls
    back to the polynomial order: the series converges iff ``d < -1``.
    """
    if not 0.0 < s <= 2.0:
        raise ValueError("s must lie in (0, 2]")
    r, la1, la2 = system.log_singular_values(R, inverse)
    lphi = _log_phi(s, la1, la2)
    log_terms = r * math.log(system.n_maps) + (-lphi if inverse else lphi)
    tail = r >= R // 2
    rt = r[tail].astype(np.float64)
    design = np.column_stack([rt, np.log(rt), np.ones_like(rt), rt**-2])
    c, d, _, _ = np.linalg.lstsq(design, log_terms[tail], rcond=None)[0]
    if c < -GROWTH_TOL:
        converges = True
    elif c > GROWTH_TOL:
        converges = False
    else:
        converges = d < -1.0 - 1e-3
    return SeriesAudit(s, r, np.exp(la1), np.exp(la2), log_terms, float(c), float(d), converges)


def _threshold(R: int, tol: float, inverse: bool, system: SeriesSystem,
               lo: float = 0.01, hi: float = 2.0, max_iter: int = 60) -> float:
    if R < 40:
        raise ValueError("truncation R must be >= 40")
    if tol < 1e-4:
        raise ValueError("tolerance must be >= 1e-4")
    if series_audit(lo, R, inverse, system).converges or not series_audit(hi, R, inverse, system).converges:
        raise ArithmeticError("convergence threshold not bracketed by [%g, %g]" % (lo, hi))
    for _ in range(max_iter):
        if hi - lo <= tol * 1e-3:
            break
        mid = 0.5 * (lo + hi)
        if series_audit(mid, R, inverse, system).converges:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def affinity_dimension(R: int = 60, tol: float = 1e-4, system: SeriesSystem = STEINHAUS_SYSTEM) -> float:
    """Smallest ``s`` for which ``sum_r 2**r phi^s(L**r)`` converges."""
    return _threshold(R, tol, False, system)


def hausdorff_lower_bound_dim(R: int = 60, tol: float = 1e-4,
                              system: SeriesSystem = STEINHAUS_SYSTEM) -> float:
    """Smallest ``s`` for which ``sum_r 2**r / phi^s(L**-r)`` converges."""
    return _threshold(R, tol, True, system)


# -- point-set distances -----------------------------------------------------

def directed_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """``max_{x in a} min_{y in b} |x - y|``."""
    dist, _ = cKDTree(b).query(a, k=1)
    return float(dist.max())


def hausdorff_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).reshape(-1, 2)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 2)
    if not len(a) or not len(b):
        raise ValueError("point sets must be non-empty")
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def min_distance(a, b, cell: float = 2.0**-8) -> float:
    """Smallest distance between two point sets.

    Nearest-neighbour queries between large, well separated sets are slow, so
    both sets are first bucketed into grid cells of side ``cell``.  Cell
    centres bound the answer to within ``2 sqrt(2) cell``; only points in cells
    that can still realize the minimum take part in the exact query.
    """
    a = np.asarray(a, dtype=np.float64).reshape(-1, 2)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 2)
    if not len(a) or not len(b):
        raise ValueError("point sets must be non-empty")
    ia = np.floor(a / cell).astype(np.int64)
    ib = np.floor(b / cell).astype(np.int64)
    ua = np.unique(ia, axis=0)
    ub = np.unique(ib, axis=0)
    ca, cb = (ua + 0.5) * cell, (ub + 0.5) * cell
    da, _ = cKDTree(cb).query(ca, k=1)
    bound = da.min() + 2.0 * math.sqrt(2.0) * cell
    db, _ = cKDTree(ca).query(cb, k=1, distance_upper_bound=bound * 1.0001)
    keep_a = ua[da <= bound]
    keep_b = ub[db <= bound]
    sa = a[_rows_in(ia, keep_a)]
    sb = b[_rows_in(ib, keep_b)]
    dist, _ = cKDTree(sb).query(sa, k=1)
    return float(dist.min())


def _rows_in(cells: np.ndarray, keep: np.ndarray) -> np.ndarray:
    lo = np.minimum(cells.min(axis=0), keep.min(axis=0))
    span = int(max(cells[:, 1].max(), keep[:, 1].max()) - lo[1]) + 1
    key = (cells[:, 0] - lo[0]) * span + (cells[:, 1] - lo[1])
    kkey = (keep[:, 0] - lo[0]) * span + (keep[:, 1] - lo[1])
    return np.isin(key, kkey)


@dataclass(frozen=True)
class InvarianceReport:
    residual: float
    separation: float


def invariance_residual(cloud: PointCloud2D, maps=(T0, T1)) -> InvarianceReport:
    """Hausdorff distance between ``cloud`` and ``T0(cloud) u T1(cloud)``.

    ``separation`` is the smallest distance between the two images; it is
    positive when the union is disjoint.
    """
    pts = cloud.points
    if not len(pts):
        raise ValueError("empty cloud")
    im0, im1 = maps[0](pts), maps[1](pts)
    residual = hausdorff_distance(pts, np.concatenate([im0, im1]))
    return InvarianceReport(residual, min_distance(im0, im1))


def analytic_cloud(depth: int = 16) -> PointCloud2D:
    """``{(gamma, f(gamma))}`` over the dyadic grid of ``[1/2, 1)``."""
    from .steinhaus import f_on_grid

    gamma, fv = f_on_grid(depth)
    return PointCloud2D(np.column_stack([gamma, fv]))


def in_parallelogram(quad: np.ndarray, pts: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Membership of ``pts`` in the parallelogram with vertices ``quad`` (in order)."""
    origin = quad[0]
    e1 = quad[1] - origin
    e2 = quad[3] - origin
    basis = np.column_stack([e1, e2])
    coef = np.linalg.solve(basis, (np.asarray(pts) - origin).T).T
    return np.all((coef >= -eps) & (coef <= 1 + eps), axis=-1)
