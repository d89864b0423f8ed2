import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mpf

from mertens.numkernel import precision
from mertens.polylog import (
    ACCEPTANCE_X_GRID,
    DivergenceError,
    appendix_bound_suite,
    eulerian_row,
    i_integral,
    i_integral_bounds,
    li_neg,
    li_neg_direct,
    neg_poly_eval,
    stirling_ratio,
)

PREC = 192


def test_eulerian_rows():
    assert eulerian_row(0) == (1,)
    assert eulerian_row(3) == (1, 4, 1)
    assert eulerian_row(4) == (1, 11, 11, 1)
    assert sum(eulerian_row(7)) == 5040


def test_half_values():
    assert li_neg(0, mpf(1) / 2, PREC) == 1
    assert li_neg(1, mpf(1) / 2, PREC) == 2
    assert li_neg(2, mpf(1) / 2, PREC) == 6


def test_direct_series_agrees():
    z = mpf(1) / 3
    assert abs(li_neg(10, z, PREC) - li_neg_direct(10, z, 400, PREC)) < mpf(10) ** -40


def test_against_mpmath_polylog():
    with precision(PREC):
        assert abs(li_neg(5, mpf("0.2"), PREC) - mpmath.polylog(-5, mpf("0.2"))) < mpf(10) ** -45


def test_divergence():
    with pytest.raises(DivergenceError):
        li_neg(3, 1, PREC)


def test_i_integral_against_quadrature():
    x = mpf(10)
    with precision(100):
        ref = mpmath.quad(lambda t: t**3 / mpf(x) ** t, [1, mpmath.inf])
    assert abs(i_integral(3, x, PREC) - ref) < mpf(10) ** -25


@given(st.integers(min_value=1, max_value=30), st.floats(min_value=1.1, max_value=50))
def test_i_recurrence(k, x):
    # I(k, x) = (1/x + k I(k-1, x)) / log x
    x = mpf(x)
    with precision(PREC):
        lhs = i_integral(k, x, PREC)
        rhs = (1 / x + k * i_integral(k - 1, x, PREC)) / mpmath.log(x)
        assert abs(lhs - rhs) <= mpf(2) ** -170 * lhs


@pytest.mark.parametrize("k", [5, 40, 120])
def test_i_sandwich(k):
    lo, hi = i_integral_bounds(k, mpf(10) ** 8, PREC)
    val = i_integral(k, mpf(10) ** 8, PREC)
    assert lo <= val <= hi


def test_ratio_tends_to_one():
    r = [neg_poly_eval(k, 2, PREC).ratio for k in (2, 5, 10)]
    assert abs(r[2] - 1) < abs(r[1] - 1) < abs(r[0] - 1)


def test_stirling_ratio_limit():
    assert stirling_ratio(400) == pytest.approx(1, abs=1e-3)


def test_bound_suite_small():
    rep = appendix_bound_suite(ACCEPTANCE_X_GRID, k_max=30, prec=PREC)
    assert rep.passed
    assert rep.summary()


def test_i_zero():
    x = mpf(7)
    with precision(PREC):
        assert abs(i_integral(0, x, PREC) - 1 / (x * mpmath.log(x))) < mpf(2) ** -180


def test_ratio_bound_k25_x2():
    r = neg_poly_eval(25, 2, PREC).ratio
    with precision(PREC):
        assert abs(r - 1) < 2 / mpmath.sqrt(50 * mpmath.pi)


def test_monotone_in_k_for_half_and_above():
    for z in (mpf(1) / 2, mpf(2) / 3, mpf("0.9")):
        vals = [li_neg(k, z, PREC) for k in range(0, 40)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_polylog_constant_reported_on_wide_grid():
    rep = appendix_bound_suite(k_max=40, prec=PREC)
    assert mpmath.isfinite(rep.polylog_constant)
    assert rep.polylog_constant > 0
