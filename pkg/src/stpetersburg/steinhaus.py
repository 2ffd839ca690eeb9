"""Steinhaus gain sequence and its limit function xi.

Dyadic arguments are carried as :class:`fractions.Fraction` so that the
location of jumps (all at dyadic rationals) is never blurred by rounding.
Floats are accepted and converted exactly; they are flagged non-exact in
:class:`DyadicExpansion` because they usually stand in for a real number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

TRUNCATION_DEPTH = 64
HALF = Fraction(1, 2)


def _check_positive(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError("index must be a positive integer")
    return n


def two_adic_valuation(n: int) -> int:
    n = _check_positive(n)
    return (n & -n).bit_length() - 1


def steinhaus_term(n: int) -> int:
    """``x_n``: twice the largest power of two dividing ``n``."""
    return 2 << two_adic_valuation(n)


def steinhaus_term_by_decomposition(n: int) -> int:
    """``x_n = 2**k`` for the unique ``k >= 1, m >= 0`` with ``n = 2**(k-1) + m 2**k``."""
    n = _check_positive(n)
    k = 1
    while (n - (1 << (k - 1))) % (1 << k):
        k += 1
    return 1 << k


def steinhaus_terms(n: int) -> np.ndarray:
    """``x_1..x_n`` as an int64 array."""
    idx = np.arange(1, _check_positive(n) + 1, dtype=np.int64)
    return 2 * (idx & -idx)


def steinhaus_partial_sum(n: int) -> int:
    """``s(n) = x_1 + ... + x_n`` via the count of indices with each valuation."""
    n = _check_positive(n)
    total = 0
    k = 1
    while (1 << (k - 1)) <= n:
        total += (1 << k) * ((n + (1 << (k - 1))) >> k)
        k += 1
    return total


def ceil_log2(n: int) -> int:
    return (_check_positive(n) - 1).bit_length()


def gamma_of(n: int) -> Fraction:
    """``gamma_n = n / 2**ceil(log2 n)`` in ``(1/2, 1]``."""
    return Fraction(n, 1 << ceil_log2(n))


def _as_fraction(gamma) -> tuple[Fraction, bool]:
    """Exact rational value and whether the input is a genuine dyadic rational."""
    if isinstance(gamma, (float, np.floating)):
        return Fraction(float(gamma)), False
    if isinstance(gamma, (Rational, int, np.integer)):
        g = Fraction(gamma)
        return g, _is_dyadic(g)
    raise TypeError(f"unsupported type for gamma: {type(gamma).__name__}")


def _is_dyadic(g: Fraction) -> bool:
    d = g.denominator
    return d & (d - 1) == 0


def _check_domain(g: Fraction, hi_open: bool = False):
    if g < HALF or g > 1 or (hi_open and g == 1):
        upper = "1)" if hi_open else "1]"
        raise ValueError(f"gamma={g} outside [1/2, {upper}")


@dataclass(frozen=True)
class DyadicExpansion:
    """``gamma = leading + sum_k digits[k-1] / 2**k``, never ending in all ones.

    ``value`` is set when the digits represent the input exactly (a dyadic
    rational reached within ``len(digits)`` digits).
    """

    leading: int
    digits: tuple[int, ...]
    value: Fraction | None
    exact: bool

    @property
    def last_one(self) -> int:
        """Position ``K`` of the final nonzero digit (0 if only ``leading`` is set)."""
        for k in range(len(self.digits), 0, -1):
            if self.digits[k - 1]:
                return k
        return 0


def dyadic_digits(gamma, depth: int = TRUNCATION_DEPTH) -> DyadicExpansion:
    """First ``depth`` digits of ``gamma`` in ``[1/2, 1]`` (greedy, terminating)."""
    g, is_exact = _as_fraction(gamma)
    _check_domain(g)
    if g == 1:
        return DyadicExpansion(1, (0,) * depth, Fraction(1), is_exact)
    digits = []
    rest = g
    for _ in range(depth):
        rest *= 2
        bit = int(rest >= 1)
        digits.append(bit)
        rest -= bit
    value = g if rest == 0 else None
    return DyadicExpansion(0, tuple(digits), value, is_exact and rest == 0)


def _weighted_digit_sum(g: Fraction) -> tuple[Fraction, int]:
    """``sum_k k eps_k / 2**k`` for ``g`` in ``[1/2, 1)`` and the last one position.

    Exact for dyadic ``g``; otherwise truncated after ``TRUNCATION_DEPTH`` digits,
    with tail below ``2 (D + 2) 2**-D``.
    """
    if _is_dyadic(g):
        num, den = g.numerator, g.denominator
        depth = den.bit_length() - 1
        acc = 0
        bits = num
        while bits:
            low = bits & -bits
            pos = low.bit_length() - 1  # digit index k = depth - pos
            acc += (depth - pos) << pos
            bits ^= low
        return Fraction(acc, den), depth
    exp = dyadic_digits(g, TRUNCATION_DEPTH)
    acc = sum(Fraction(k, 1 << k) for k, e in enumerate(exp.digits, start=1) if e)
    return acc, exp.last_one


def _log2(g: Fraction) -> float:
    if _is_dyadic(g):
        return math.log2(g.numerator) - (g.denominator.bit_length() - 1)
    return math.log2(g.numerator) - math.log2(g.denominator)


def xi(gamma) -> float:
    """``xi(gamma) = 2 - log2 gamma - gamma**-1 sum_k k eps_k / 2**k``."""
    g, _ = _as_fraction(gamma)
    _check_domain(g)
    if g == 1:
        return 2.0
    acc, _ = _weighted_digit_sum(g)
    return 2.0 - _log2(g) - float(acc / g)


def xi_left_limit(gamma) -> float:
    """``xi(gamma-)`` at a dyadic rational ``gamma`` in ``(1/2, 1]``.

    The final digit one at position ``K`` is replaced by zero followed by ones;
    that tail contributes ``sum_{k > K} k/2**k = (K + 2)/2**K``.
    """
    g, _ = _as_fraction(gamma)
    if not _is_dyadic(g):
        raise ValueError(f"left limit only defined here at dyadic rationals, got {g}")
    if g <= HALF or g > 1:
        raise ValueError(f"gamma={g} outside (1/2, 1]")
    if g == 1:
        acc, last = Fraction(0), 0
    else:
        acc, last = _weighted_digit_sum(g)
        acc -= Fraction(last, 1 << last)
    acc += Fraction(last + 2, 1 << last)
    return 2.0 - _log2(g) - float(acc / g)


@dataclass(frozen=True)
class XiPoint:
    gamma: Fraction
    value: float
    left_value: float | None


def xi_point(gamma) -> XiPoint:
    g, _ = _as_fraction(gamma)
    left = xi_left_limit(g) if _is_dyadic(g) and g > HALF else None
    return XiPoint(g, xi(g), left)


def f_value(gamma) -> float:
    """``f(gamma) = 2 gamma - sum_k k eps_k / 2**k`` on ``[1/2, 1)``."""
    return float(f_exact(gamma))


def f_exact(gamma) -> Fraction:
    """Rational value of ``f``; exact for dyadic input, truncated otherwise."""
    g, _ = _as_fraction(gamma)
    _check_domain(g, hi_open=True)
    acc, _ = _weighted_digit_sum(g)
    return 2 * g - acc


def t_transform(t, x):
    """``T(t, x) = (t, x/t - log2 t)``."""
    t = _check_t(t)
    return t, _scalar(np.asarray(x) / t - np.log2(t))


def t_inverse_transform(t, x):
    """``T^-1(t, x) = (t, t (x + log2 t))``."""
    t = _check_t(t)
    return t, _scalar(t * (np.asarray(x) + np.log2(t)))


def _check_t(t):
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < 0.5) or np.any(arr > 1.0):
        raise ValueError("t must lie in [1/2, 1]")
    return _scalar(arr)


def _scalar(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def steinhaus_identity_residual(n: int) -> float:
    """``|(s(n) - n log2 n)/n - xi(gamma_n)|``."""
    n = _check_positive(n)
    lhs = (steinhaus_partial_sum(n) - n * math.log2(n)) / n
    return abs(lhs - xi(gamma_of(n)))


def feller_ratio(n: int) -> float:
    """``s(n) / (n log2 n)``."""
    n = _check_positive(n)
    return steinhaus_partial_sum(n) / (n * math.log2(n))


# -- grid evaluation ---------------------------------------------------------

def dyadic_grid(depth: int, include_one: bool = True) -> np.ndarray:
    """Numerators ``j`` of ``gamma = j / 2**depth`` covering ``[1/2, 1]``."""
    if not 1 <= depth <= 52:
        raise ValueError("grid depth must lie in [1, 52]")
    lo, hi = 1 << (depth - 1), 1 << depth
    return np.arange(lo, hi + 1 if include_one else hi, dtype=np.int64)


def _grid_digit_sums(num: np.ndarray, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``sum_k k eps_k 2**-k`` and last-one position for ``num / 2**depth < 1``."""
    acc = np.zeros(len(num), dtype=np.float64)
    last = np.zeros(len(num), dtype=np.int64)
    for k in range(1, depth + 1):
        bit = (num >> (depth - k)) & 1
        acc += bit * (k * 2.0**-k)
        last = np.where(bit == 1, k, last)
    return acc, last


def xi_on_grid(depth: int, include_one: bool = True):
    """``(gamma, xi, xi_left)`` arrays over a dyadic grid.

    ``xi_left`` is NaN at ``gamma = 1/2`` where no left limit exists in the domain.
    """
    num = dyadic_grid(depth, include_one)
    gamma = num / float(1 << depth)
    below = num < (1 << depth)
    acc, last = _grid_digit_sums(np.where(below, num, 0), depth)
    log2g = np.log2(gamma)
    value = np.where(below, 2.0 - log2g - acc / gamma, 2.0)
    # replace the final one at K by 0111...; gamma = 1 behaves as K = 0
    last = np.where(below, last, 0)
    lacc = np.where(below, acc, 0.0) - last * np.exp2(-last.astype(np.float64)) \
        + (last + 2) * np.exp2(-last.astype(np.float64))
    left = 2.0 - log2g - lacc / gamma
    left[num == (1 << (depth - 1))] = np.nan
    return gamma, value, left


def f_on_grid(depth: int):
    """``(gamma, f)`` over the grid on ``[1/2, 1)``."""
    num = dyadic_grid(depth, include_one=False)
    gamma = num / float(1 << depth)
    acc, _ = _grid_digit_sums(num, depth)
    return gamma, 2.0 * gamma - acc


def f_left_on_grid(depth: int):
    """``(gamma, f(gamma-))`` over the grid on ``(1/2, 1]``."""
    num = dyadic_grid(depth)[1:]
    gamma = num / float(1 << depth)
    below = num < (1 << depth)
    acc, last = _grid_digit_sums(np.where(below, num, 0), depth)
    last = np.where(below, last, 0)
    w = np.exp2(-last.astype(np.float64))
    return gamma, 2.0 * gamma - (acc - last * w + (last + 2) * w)
