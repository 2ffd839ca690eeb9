"""Simulation of (generalized) St. Petersburg games and their normalized paths.

A single game tosses a coin with heads probability ``p`` until the first head
at toss ``T`` and pays ``p**-1 * q**(1 - T)``; the fair game ``p = 1/2`` pays
``2**T``.  Repeated games are accumulated into a :class:`GainPath`, from which
block paths approximating the limit processes ``X`` and ``Y`` are cut out.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

log = logging.getLogger(__name__)

MAX_STOPPING_TIME = 64
EXACT_TRACK_MAX_N = 2**24


@dataclass(frozen=True)
class CoinParams:
    p: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise ValueError(f"coin parameter p must lie in (0, 1), got {self.p!r}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def is_fair(self) -> bool:
        return self.p == 0.5

    @property
    def base(self) -> float:
        """Growth factor ``1/q`` of the block structure (2 for the fair game)."""
        return 1.0 / self.q


FAIR = CoinParams(0.5)


def replica_rng(seed: int, replica: int = 0) -> np.random.Generator:
    """Independent PCG64 stream derived from ``(seed, replica)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(replica),))
    return np.random.Generator(np.random.PCG64(ss))


def first_heads(tosses: Iterable[bool]) -> int:
    """Index (1-based) of the first head in an explicit coin stream."""
    for i, heads in enumerate(tosses, start=1):
        if heads:
            return i
    raise ValueError("coin stream ended without heads")


def sample_stopping_time(rng: np.random.Generator, params: CoinParams = FAIR,
                         size: int | None = None, mode: str = "inverse"):
    """Draw ``T`` with ``P(T = k) = p q**(k-1)``, capped at 64.

    ``mode="inverse"`` uses inverse-transform sampling of the geometric law;
    ``mode="coin"`` flips coins literally and is meant for auditing only.
    """
    if mode == "coin":
        n = 1 if size is None else size
        out = np.empty(n, dtype=np.int64)
        for i in range(n):
            t = 1
            while t < MAX_STOPPING_TIME and not rng.random() < params.p:
                t += 1
            out[i] = t
        return int(out[0]) if size is None else out
    if mode != "inverse":
        raise ValueError(f"unknown sampling mode {mode!r}")

    u = 1.0 - rng.random(size)  # in (0, 1]
    if params.is_fair:
        t = 1 + np.floor(-np.log2(u))
    else:
        t = 1 + np.floor(np.log(u) / math.log(params.q))
    t = np.minimum(t, MAX_STOPPING_TIME).astype(np.int64)
    return int(t) if size is None else t


def gain_for(t, params: CoinParams = FAIR):
    """Payout ``p**-1 q**(1-T)`` for stopping time(s) ``t``."""
    if params.is_fair:
        if np.isscalar(t):
            return float(2 ** int(t))
        return np.ldexp(1.0, np.asarray(t, dtype=np.int64))
    return (1.0 / params.p) * np.power(params.q, 1 - np.asarray(t, dtype=np.float64))


def sample_gain(rng: np.random.Generator, params: CoinParams = FAIR,
                size: int | None = None, mode: str = "inverse"):
    return gain_for(sample_stopping_time(rng, params, size=size, mode=mode), params)


@dataclass(frozen=True, eq=False)
class GainPath:
    """Cumulative gains ``S_1..S_n``.

    ``exact`` holds an integer (int64) copy of the sums for fair games when
    it fits; otherwise it is ``None``.
    """

    sums: np.ndarray
    params: CoinParams = FAIR
    seed: int | None = None
    exact: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.sums.setflags(write=False)
        if self.exact is not None:
            self.exact.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.sums)

    @classmethod
    def from_gains(cls, gains: Sequence[float], params: CoinParams = FAIR,
                   seed: int | None = None, stopping_times=None) -> "GainPath":
        gains = np.asarray(gains, dtype=np.float64)
        if gains.ndim != 1 or len(gains) == 0:
            raise ValueError("need a non-empty 1-d array of gains")
        if np.any(gains <= 0):
            raise ValueError("gains must be positive")
        sums = np.cumsum(gains)
        exact = None
        if params.is_fair and len(gains) <= EXACT_TRACK_MAX_N:
            if stopping_times is None and np.all(gains == np.round(gains)):
                exact = _exact_track(gains.astype(np.int64) if gains.max() < 2.0**62 else None)
            elif stopping_times is not None:
                exact = _exact_track_from_times(np.asarray(stopping_times))
            if exact is not None:
                _cross_check(sums, exact)
        return cls(sums=sums, params=params, seed=seed, exact=exact)


def _exact_track(int_gains):
    if int_gains is None:
        log.info("integer gain track dropped: a gain exceeds the int64 range")
        return None
    n = len(int_gains)
    if int(int_gains.max()) * n >= 2**63:
        log.info("integer gain track dropped: partial sums may overflow int64")
        return None
    return np.cumsum(int_gains)


def _exact_track_from_times(times):
    tmax = int(times.max())
    if tmax > 62 or (len(times) << tmax) >= 2**63:
        log.info("integer gain track dropped: partial sums may overflow int64")
        return None
    return np.cumsum(np.left_shift(np.int64(1), times.astype(np.int64)))


def _cross_check(sums, exact):
    # float cumsum of integers is exact below 2**53 and within n*eps above it
    rel = np.abs(sums - exact.astype(np.float64)) / exact.astype(np.float64)
    bound = len(sums) * np.finfo(np.float64).eps
    if rel.max(initial=0.0) > bound:
        raise ArithmeticError("float and integer gain tracks disagree")


def simulate_partial_sums(n: int, params: CoinParams = FAIR, seed: int = 0,
                          replica: int = 0, rng: np.random.Generator | None = None) -> GainPath:
    """Total gains of ``n`` independent games, reproducible from ``(seed, replica)``."""
    if n < 1:
        raise ValueError("need at least one game")
    if rng is None:
        rng = replica_rng(seed, replica)
    times = sample_stopping_time(rng, params, size=n)
    gains = gain_for(times, params)
    return GainPath.from_gains(gains, params, seed=seed,
                               stopping_times=times if params.is_fair else None)


@dataclass(frozen=True, eq=False)
class SampledPath:
    """Function samples ``v(t)`` at strictly increasing ``t`` inside ``domain``."""

    t: np.ndarray
    v: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        if self.t.shape != self.v.shape or self.t.ndim != 1:
            raise ValueError("t and v must be 1-d arrays of equal length")
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("t must be strictly increasing")
        a, b = self.domain
        if len(self.t) and (self.t[0] < a or self.t[-1] > b):
            raise ValueError("samples fall outside the domain")
        self.t.setflags(write=False)
        self.v.setflags(write=False)

    def __len__(self):
        return len(self.t)

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.t, self.v])


def _block(params: CoinParams, m: int) -> tuple[int, int, float]:
    """Index range ``(lo, hi]`` with ``ceil(log_b k) = m`` and the scale ``b**m``."""
    if m < 1:
        raise ValueError("level m must be >= 1")
    if params.is_fair:
        return 1 << (m - 1), 1 << m, float(1 << m)
    scale = params.base ** m
    return int(math.floor(params.base ** (m - 1))), int(math.floor(scale)), scale


def _log_base(k: np.ndarray, params: CoinParams) -> np.ndarray:
    if params.is_fair:
        return np.log2(k)
    return np.log(k) / math.log(params.base)


def y_path_approx(path: GainPath, m: int) -> SampledPath:
    """Block path ``(k/b**m, (S_k - k log_b k)/k)`` over ``k`` in ``(b**(m-1), b**m]``."""
    lo, hi, scale = _block(path.params, m)
    if path.n < hi:
        raise ValueError(f"path has {path.n} games, level {m} needs {hi}")
    k = np.arange(lo + 1, hi + 1, dtype=np.int64)
    kf = k.astype(np.float64)
    s = path.sums[lo:hi]
    v = (s - kf * _log_base(kf, path.params)) / kf
    return SampledPath(kf / scale, v, (path.params.q, 1.0))


def x_path_approx(path: GainPath, m: int, full: bool = False) -> SampledPath:
    """Block path ``(k/b**m, (S_k - k m)/b**m)``.

    With ``full`` the path runs over all ``k`` in ``[1, b**m]`` (t in (0, 1]);
    the normalization is the same as on the top block.
    """
    lo, hi, scale = _block(path.params, m)
    if path.n < hi:
        raise ValueError(f"path has {path.n} games, level {m} needs {hi}")
    if full:
        lo = 0
    kf = np.arange(lo + 1, hi + 1, dtype=np.float64)
    v = (path.sums[lo:hi] - kf * m) / scale
    domain = (0.0, 1.0) if full else (path.params.q, 1.0)
    return SampledPath(kf / scale, v, domain)


def martin_lof_statistic(path: GainPath, m: int) -> float:
    """``(S_{2^m} - m 2^m) / 2^m`` for the fair game (x-path value at t = 1)."""
    _, hi, scale = _block(path.params, m)
    if path.n < hi:
        raise ValueError(f"path has {path.n} games, level {m} needs {hi}")
    if path.exact is not None:
        return float(Fraction(int(path.exact[hi - 1]) - m * hi, hi))
    return float((path.sums[hi - 1] - m * hi) / scale)


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|``."""
    return float(stats.ks_2samp(np.asarray(a), np.asarray(b)).statistic)


def ks_threshold(n_a: int, n_b: int, c_alpha: float = 1.63) -> float:
    """Asymptotic KS rejection threshold; ``c_alpha = 1.63`` is the 1% level."""
    return c_alpha * math.sqrt((n_a + n_b) / (n_a * n_b))


@dataclass(frozen=True)
class SemiSelfSimilarity:
    statistic: float
    threshold: float
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.statistic < self.threshold


def semi_selfsimilarity_samples(m: int, replicas: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Replicas of ``X_m(1)`` and ``2 (X_m(1/2) + 1/2)`` from independent runs."""
    half = 1 << (m - 1)
    a = np.empty(replicas)
    b = np.empty(replicas)
    for i in range(replicas):
        pa = simulate_partial_sums(1 << m, FAIR, seed, replica=2 * i)
        a[i] = x_path_approx(pa, m).v[-1]
        pb = simulate_partial_sums(half, FAIR, seed, replica=2 * i + 1)
        x_half = (pb.sums[half - 1] - half * m) / float(1 << m)
        b[i] = 2.0 * (x_half + 0.5)
    return a, b


def semi_selfsimilarity_check(m: int, replicas: int, seed: int,
                              shift: float = 0.0) -> SemiSelfSimilarity:
    """KS comparison of ``X(1)`` with ``2(X(1/2) + 1/2)``.

    ``shift`` is added to the second sample and serves as a negative control.
    """
    if replicas < 100:
        raise ValueError("need at least 100 replicas")
    a, b = semi_selfsimilarity_samples(m, replicas, seed)
    b = b + shift
    return SemiSelfSimilarity(ks_statistic(a, b), ks_threshold(replicas, replicas), a, b)


def gain_frequency_chi2(n: int, seed: int, kmax: int = 12) -> tuple[float, float]:
    """Chi-square test of single-game gain frequencies against ``2**-k``.

    Returns ``(statistic, p_value)``; values ``2**k`` with ``k > kmax`` are pooled.
    """
    t = sample_stopping_time(replica_rng(seed), FAIR, size=n)
    observed = np.bincount(np.minimum(t, kmax + 1), minlength=kmax + 2)[1:]
    probs = np.array([2.0**-k for k in range(1, kmax + 1)] + [2.0**-kmax])
    res = stats.chisquare(observed, n * probs)
    return float(res.statistic), float(res.pvalue)
