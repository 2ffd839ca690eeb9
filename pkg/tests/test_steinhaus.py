import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stpetersburg import steinhaus as sh


def dyadic_in(lo_num, depth):
    """Strategy for j / 2**depth with j in [lo_num, 2**depth)."""
    return st.integers(min_value=lo_num, max_value=(1 << depth) - 1).map(
        lambda j: Fraction(j, 1 << depth))


half_open_dyadics = st.integers(2, 40).flatmap(lambda d: dyadic_in(1 << (d - 1), d))


class TestTerms:
    def test_prefix(self):
        expected = [2, 4, 2, 8, 2, 4, 2, 16, 2, 4, 2, 8, 2, 4, 2, 32]
        assert [sh.steinhaus_term(n) for n in range(1, 17)] == expected
        assert list(sh.steinhaus_terms(16)) == expected

    @pytest.mark.parametrize("n,x", [(1, 2), (4, 8), (6, 4), (16, 32), (2**20, 2**21)])
    def test_examples(self, n, x):
        assert sh.steinhaus_term(n) == x
        assert sh.steinhaus_term_by_decomposition(n) == x

    def test_definitions_agree_up_to_2_pow_20(self):
        n = np.arange(1, 2**20 + 1, dtype=np.int64)
        oracle = np.zeros_like(n)
        for k in range(1, 22):
            # n = 2^(k-1) mod 2^k selects the k-th summand
            oracle[n % (1 << k) == 1 << (k - 1)] = 1 << k
        assert np.array_equal(sh.steinhaus_terms(2**20), oracle)

    def test_partial_sums_small(self):
        assert [sh.steinhaus_partial_sum(n) for n in (1, 2, 3)] == [2, 6, 8]

    def test_partial_sum_closed_form(self):
        cums = np.cumsum(sh.steinhaus_terms(2**16))
        idx = list(range(1, 300)) + [2**16 - 1, 2**16]
        assert all(sh.steinhaus_partial_sum(n) == cums[n - 1] for n in idx)

    @given(st.integers(1, 2**40))
    def test_term_frequencies(self, n):
        for k in range(1, 8):
            count = n // 2**(k - 1) - n // 2**k
            assert abs(count / n - 2.0**-k) <= 2 / n

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            sh.steinhaus_term(0)


class TestGamma:
    @pytest.mark.parametrize("n,g", [(1, Fraction(1)), (3, Fraction(3, 4)), (5, Fraction(5, 8)),
                                     (8, Fraction(1)), (9, Fraction(9, 16))])
    def test_values(self, n, g):
        assert sh.gamma_of(n) == g

    @given(st.integers(1, 2**50))
    def test_range(self, n):
        assert Fraction(1, 2) < sh.gamma_of(n) <= 1


class TestDigits:
    def test_three_quarters(self):
        d = sh.dyadic_digits(Fraction(3, 4))
        assert d.digits[:3] == (1, 1, 0) and d.last_one == 2 and d.exact

    def test_one(self):
        d = sh.dyadic_digits(1)
        assert d.leading == 1 and not any(d.digits) and d.last_one == 0

    def test_non_dyadic_is_truncated(self):
        d = sh.dyadic_digits(Fraction(2, 3), depth=8)
        assert d.digits == (1, 0, 1, 0, 1, 0, 1, 0) and d.value is None and not d.exact

    def test_float_input_not_exact(self):
        assert not sh.dyadic_digits(0.75).exact

    def test_outside_domain(self):
        with pytest.raises(ValueError):
            sh.dyadic_digits(Fraction(1, 3))


class TestXi:
    def test_three_quarters(self):
        expected = 4 - math.log2(3) - 4 / 3
        assert sh.xi(Fraction(3, 4)) == pytest.approx(expected, abs=1e-15)

    def test_five_eighths(self):
        # digits 101 give 1/2 + 3/8
        expected = 2 - math.log2(5 / 8) - (7 / 8) / (5 / 8)
        assert sh.xi(Fraction(5, 8)) == pytest.approx(expected, abs=1e-15)

    def test_left_limit_three_quarters(self):
        # 3/4 = 0.10111..., digit sum 1/2 + sum_{k>=3} k/2^k = 3/2
        expected = 2 - math.log2(0.75) - 1.5 / 0.75
        assert sh.xi_left_limit(Fraction(3, 4)) == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(0.415, abs=1e-3)

    def test_endpoints(self):
        assert sh.xi(Fraction(1, 2)) == 2.0
        assert sh.xi(1) == 2.0
        assert abs(sh.xi_left_limit(1)) <= 1e-12

    def test_non_dyadic(self):
        # 2/3 = 0.1010...; sum (2j+1)/2^(2j+1) = 10/9
        expected = 2 - math.log2(2 / 3) - (10 / 9) / (2 / 3)
        assert sh.xi(Fraction(2, 3)) == pytest.approx(expected, abs=1e-15)

    def test_xi_point(self):
        pt = sh.xi_point(Fraction(3, 4))
        assert pt.value == sh.xi(Fraction(3, 4)) and pt.left_value == sh.xi_left_limit(Fraction(3, 4))

    def test_identity_small_n(self):
        assert sh.steinhaus_identity_residual(1) == 0.0
        assert all(sh.steinhaus_identity_residual(n) <= 1e-12 for n in range(1, 2049))

    @given(st.integers(1, 2**45))
    @settings(max_examples=200)
    def test_identity_large_n(self, n):
        assert sh.steinhaus_identity_residual(n) <= 1e-9

    def test_feller_ratio(self):
        assert sh.feller_ratio(2**16) == pytest.approx(1.125, abs=1e-15)


class TestGrid:
    def test_grid_matches_scalar(self):
        depth = 9
        gamma, value, left = sh.xi_on_grid(depth)
        for j in range(len(gamma)):
            g = Fraction((1 << (depth - 1)) + j, 1 << depth)
            assert value[j] == pytest.approx(sh.xi(g), abs=1e-13)
            if j:
                assert left[j] == pytest.approx(sh.xi_left_limit(g), abs=1e-13)
        assert np.isnan(left[0])

    def test_range(self):
        _, value, _ = sh.xi_on_grid(14)
        assert value.min() < 0.001 and value.max() == 2.0 and value.min() >= 0

    def test_positive_jumps(self):
        _, value, left = sh.xi_on_grid(14)
        jumps = (value - left)[1:]
        assert np.all(jumps > 0)

    def test_f_grid(self):
        gamma, f = sh.f_on_grid(8)
        assert len(gamma) == 128 and gamma[-1] < 1
        assert f[0] == 0.5


class TestF:
    @pytest.mark.parametrize("g,v", [(Fraction(1, 2), 0.5), (Fraction(3, 4), 0.5), (Fraction(7, 8), 0.375)])
    def test_values(self, g, v):
        assert sh.f_value(g) == v

    def test_excludes_one(self):
        with pytest.raises(ValueError):
            sh.f_value(1)

    def test_transform_of_xi(self):
        t, x = sh.t_inverse_transform(0.75, sh.xi(Fraction(3, 4)))
        assert (t, x) == (0.75, pytest.approx(0.5, abs=1e-15))

    @given(st.floats(0.5, 1.0), st.floats(-5, 5))
    def test_round_trip(self, t, x):
        t2, y = sh.t_transform(*sh.t_inverse_transform(t, x))
        assert t2 == t and y == pytest.approx(x, abs=1e-14)

    def test_transform_domain(self):
        with pytest.raises(ValueError):
            sh.t_transform(0.25, 0.0)

    @given(half_open_dyadics)
    def test_self_affinity(self, g):
        target = (1 - g + sh.f_exact(g)) / 2
        assert sh.f_exact(g / 2 + Fraction(1, 2)) == target
        assert sh.f_exact(g / 2 + Fraction(1, 4)) == target

    @given(half_open_dyadics)
    def test_f_matches_xi(self, g):
        assert sh.f_value(g) == pytest.approx(float(g) * (sh.xi(g) + math.log2(g)), abs=1e-14)
