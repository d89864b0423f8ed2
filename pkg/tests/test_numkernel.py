import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mpf

from mertens.numkernel import (
    PowerSeries,
    PrecisionError,
    SeriesError,
    check_prec,
    compensated_sum,
    exp_linear,
    hp,
    poly_from_roots,
    precision,
    series_deriv,
    series_div,
    series_exp,
    series_integral,
    series_log,
    series_mul,
)

PREC = 192
TOL = mpf(2) ** (8 - PREC)

coeff = st.floats(min_value=-1, max_value=1, allow_nan=False)


def ps(values):
    return PowerSeries(tuple(values))


def close(a: PowerSeries, b: PowerSeries, tol=TOL):
    assert a.order == b.order
    return all(abs(x - y) <= tol for x, y in zip(a, b))


def test_mul_difference_of_squares():
    with precision(PREC):
        out = series_mul(ps([1, 1, 0]), ps([1, -1, 0]))
    assert list(out) == [1, 0, -1]


def test_mul_identity():
    a = ps([3, -2, 5, 7])
    assert series_mul(a, ps([1, 0, 0, 0])) == a


def test_order_mismatch_is_rejected():
    with pytest.raises(SeriesError):
        series_mul(ps([1, 2]), ps([1, 2, 3]))


def test_exp_of_w():
    with precision(PREC):
        e = series_exp(PowerSeries.variable(4))
    assert [float(c) for c in e] == pytest.approx([1, 1, 1 / 2, 1 / 6, 1 / 24], rel=1e-15)


def test_exp_of_zero_and_bad_constant():
    assert list(series_exp(ps([0, 0, 0]))) == [1, 0, 0]
    with pytest.raises(SeriesError):
        series_exp(ps([1, 0]))


def test_exp_times_exp_of_negative():
    with precision(PREC):
        a = ps([0] + [mpf(1) / (i + 1) for i in range(20)])
        out = series_exp(a) * series_exp(-a)
        assert close(out, PowerSeries.constant(1, 20))


def test_gamma_series_reciprocal_at_half():
    # log Gamma(1+w) = -gamma w + sum zeta(j) (-w)^j / j; the series converges
    # slowly at w = 1/2, so use a long truncation
    order = 60
    with precision(PREC):
        a = [mpf(0), -mpmath.euler] + [mpmath.zeta(j) * (-1) ** j / j for j in range(2, order + 1)]
        g = series_exp(ps(a))
        val = 1 / g(mpf(1) / 2)
        assert abs(val - 2 / mpmath.sqrt(mpmath.pi)) < mpf(10) ** -15


def test_div_geometric_and_self():
    with precision(PREC):
        assert list(series_div(PowerSeries.constant(1, 3), ps([1, -1, 0, 0]))) == [1, 1, 1, 1]
        a = ps([2, 3, 5])
        assert close(series_div(a, a), PowerSeries.constant(1, 2))
    with pytest.raises(SeriesError):
        series_div(ps([1, 1]), ps([0, 1]))


def test_log_derivative_of_geometric():
    with precision(PREC):
        A = series_div(PowerSeries.constant(1, 8), ps([1, -1] + [0] * 7))
        q = series_div(series_deriv(A), A.truncate(7))
    assert list(q) == [1] * 8


def test_deriv_examples():
    assert list(series_deriv(ps([5]))) == [0]
    assert list(series_deriv(ps([0, 1, 1]))) == [1, 2]


def test_deriv_of_exp_is_exp():
    with precision(PREC):
        e = series_exp(PowerSeries.variable(12))
        assert close(series_deriv(e), e.truncate(11))


def test_log_inverts_exp():
    with precision(PREC):
        a = ps([0, mpf(1) / 3, -mpf(1) / 5, mpf(2) / 7, 0, 1])
        assert close(series_log(series_exp(a)), a)


def test_integral_then_deriv():
    a = ps([1, 2, 3, 4])
    i = series_integral(a, 7)
    assert i[0] == 7
    assert list(series_deriv(i)) == [1, 2, 3]


def test_exp_linear_and_roots():
    with precision(PREC):
        assert close(exp_linear(2, 6), series_exp(ps([0, 2, 0, 0, 0, 0, 0])))
        p = poly_from_roots([1, 2], 3)
    assert list(p) == [2, -3, 1, 0]


def test_precision_guard():
    with pytest.raises(PrecisionError):
        check_prec(32)
    assert check_prec(None) == 192
    assert hp("0.1", 64) != hp("0.1", 128)


def test_compensated_sum_cancellation():
    with precision(64):
        vals = [mpf(1), mpf(2) ** -80, -mpf(1)]
        assert compensated_sum(vals) == mpf(2) ** -80


@given(st.lists(coeff, min_size=6, max_size=6), st.lists(coeff, min_size=6, max_size=6),
       st.lists(coeff, min_size=6, max_size=6))
def test_mul_associative(a, b, c):
    with precision(PREC):
        A, B, C = ps(a), ps(b), ps(c)
        assert close((A * B) * C, A * (B * C), mpf(2) ** (16 - PREC))


@given(st.lists(coeff, min_size=8, max_size=8))
def test_div_by_exp_is_exp_of_negative(a):
    with precision(PREC):
        A = ps([0] + a[1:])
        lhs = series_div(PowerSeries.constant(1, 7), series_exp(A))
        assert close(lhs, series_exp(-A), mpf(2) ** (24 - PREC))


@given(st.lists(coeff, min_size=5, max_size=5), st.floats(min_value=-0.25, max_value=0.25))
def test_truncation_error_below_omitted_term_bound(a, w):
    # series of exp(sum a_i w^i); |coeffs| of exp are bounded by e^{sum |a_i|}
    with precision(PREC):
        A = ps([0] + a[1:] + [0] * 8)
        full = series_exp(A)
        short = full.truncate(4)
        w = mpf(w)
        bound = sum(abs(c) for c in full.coeffs[5:]) * abs(w) ** 5
        assert abs(full(w) - short(w)) <= bound + TOL
