from fractions import Fraction

import pytest

from asw_slopes.dwork import (
    artin_hasse,
    char_series_via_operator,
    pi_of_T,
    splitting_coefficients,
    structural_floor,
    t_adic_sum_via_operator,
)
from asw_slopes.errors import ConfigError
from asw_slopes.expsum import (
    TowerSpec,
    char_series,
    t_adic_sum,
    t_valuation_points,
)
from asw_slopes.series import TruncSeries, compose

SPEC2 = TowerSpec(2, 1, [0, 0, 0, 1])
SPEC3 = TowerSpec(3, 1, [0, 0, 1])


def _rational_artin_hasse(p, order):
    """exp(sum x^{p^i}/p^i) with Fractions, an independent oracle."""
    sums = [Fraction(0)] * (order - 1)
    e = 0
    while p**e < order:
        # power-sum convention: coefficient of x^k is S_k / k
        sums[p**e - 1] = Fraction(p**e, p**e)
        e += 1
    out = [Fraction(1)]
    for n in range(1, order):
        acc = Fraction(0)
        for k in range(1, n + 1):
            if sums[k - 1]:
                acc += sums[k - 1] * out[n - k]
        out.append(acc / n)
    return out


@pytest.mark.parametrize("p", [2, 3, 5])
def test_artin_hasse_matches_rational_oracle(p):
    order, digits = 12, 6
    E = artin_hasse(p, order, digits)
    mod = p**digits
    want = _rational_artin_hasse(p, order)
    for c, frac in zip(E.coeffs, want):
        assert frac.denominator % p != 0
        expect = frac.numerator * pow(frac.denominator, -1, mod) % mod
        assert c.value % mod == expect


def test_pi_of_T_inverts_the_exponential():
    p, order, digits = 3, 9, 5
    E = artin_hasse(p, order, digits)
    piT = pi_of_T(p, order, digits)
    back = compose(E, piT)  # should be exactly 1 + T
    vals = [c.value % p**digits for c in back.coeffs]
    assert vals[0] == 1 and vals[1] == 1
    assert all(v == 0 for v in vals[2:])


def test_splitting_coefficients_grid():
    rows = c = splitting_coefficients(SPEC2, x_max=8, w_order=12, digits=5)
    assert c[0][0] == 1
    for J in range(8):
        for r in range(12):
            if r < J or r % SPEC2.d:
                assert rows[J][r] == 0


def test_splitting_coefficients_paths_agree():
    # digits 31 pushes the accumulator past the int64 budget: python path
    wide = splitting_coefficients(SPEC2, 6, 9, 31)
    fast = splitting_coefficients(SPEC2, 6, 9, 4)
    for rw, rf in zip(wide, fast):
        assert [x % 2**4 for x in rw] == rf


def test_operator_requires_prime_base():
    spec = TowerSpec(2, 2, [0, 1, 0, 1])
    with pytest.raises(ConfigError):
        t_adic_sum_via_operator(spec, 1, 4, 3)


@pytest.mark.parametrize("spec,kmax", [(SPEC2, 3), (SPEC3, 2)])
def test_power_sums_match_point_counts(spec, kmax):
    for k in range(1, kmax + 1):
        via_op = t_adic_sum_via_operator(spec, k, 6, 4)
        via_pts = t_adic_sum(spec, k, 6, 4)
        mod = spec.p**4
        assert [c.value % mod for c in via_op.coeffs] == [
            c.value % mod for c in via_pts.coeffs
        ]


def test_char_series_pathways_small():
    A = char_series(SPEC2, t_order=10, s_order=4, digits=4)
    B = char_series_via_operator(SPEC2, t_order=10, s_order=4, digits=4)
    mod = 2**4
    for ca, cb in zip(A.coeffs, B.coeffs):
        assert [x.value % mod for x in ca.coeffs] == [x.value % mod for x in cb.coeffs]


def test_structural_floor_bounds_series():
    assert [structural_floor(SPEC2, k) for k in range(5)] == [0, 0, 1, 3, 6]
    C = char_series(SPEC2, t_order=10, s_order=4, digits=4)
    for k, val in t_valuation_points(C):
        bound = Fraction(structural_floor(SPEC2, k), SPEC2.d)
        if val.is_exact():
            assert val.value >= bound
