import mpmath
import pytest
from mpmath import mpf

from mertens.gammaderiv import (
    gamma_double_prime,
    gamma_prime,
    inv_gamma_derivative_closed,
    inv_gamma_jet,
    inv_gamma_series_at_one,
)
from mertens.numkernel import precision

PREC = 192
TOL = mpf(10) ** -50


def test_series_at_one_starts_with_gamma():
    ser = inv_gamma_series_at_one(4, PREC)
    with precision(PREC):
        assert ser[0] == 1
        assert abs(ser[1] - mpmath.euler) < TOL
        assert abs(ser[2] - (mpmath.euler**2 / 2 - mpmath.pi**2 / 12)) < TOL


@pytest.mark.parametrize("M", [1, 2, 5])
def test_gamma_derivatives_against_mpmath(M):
    with precision(PREC):
        assert abs(gamma_prime(M, PREC) - mpmath.diff(mpmath.gamma, M)) < mpf(10) ** -40
        assert abs(gamma_double_prime(M, PREC) - mpmath.diff(mpmath.gamma, M, 2)) < mpf(10) ** -35


@pytest.mark.parametrize("M", range(0, 13))
def test_jet_values_vanish_at_poles(M):
    jet = inv_gamma_jet(M, 4, PREC)
    # 1/Gamma has simple zeros at 0, -1, -2, ...; at 1 it equals 1
    assert jet.derivs[0] == (1 if M == 0 else 0)


@pytest.mark.parametrize("M", range(1, 13))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_jet_against_closed_forms(n, M):
    jet = inv_gamma_jet(M, 3, PREC)
    closed = inv_gamma_derivative_closed(n, M, PREC)
    assert abs(jet.derivs[n] - closed) <= TOL * max(1, abs(closed))


def test_jet_against_numerical_derivative():
    jet = inv_gamma_jet(3, 2, PREC)
    with precision(PREC):
        num = mpmath.diff(mpmath.rgamma, -2, 2)
    assert abs(jet.derivs[2] - num) < mpf(10) ** -30


def test_taylor_rescaling():
    jet = inv_gamma_jet(2, 5, PREC)
    t = jet.taylor()
    with precision(PREC):
        assert abs(t[3] * 6 - jet.derivs[3]) < TOL


def test_simple_pole_values():
    assert inv_gamma_jet(3, 2, PREC).derivs[1] == 2
    with precision(PREC):
        assert abs(inv_gamma_jet(2, 2, PREC).derivs[2] - 2 * (1 - mpmath.euler)) < TOL


def test_finite_difference_at_5_and_4():
    h = mpf(2) ** (-PREC // 3)
    with precision(PREC):
        fd1 = (mpmath.gamma(5 + h) - mpmath.gamma(5 - h)) / (2 * h)
        fd2 = (mpmath.gamma(4 + h) - 2 * mpmath.gamma(4) + mpmath.gamma(4 - h)) / h**2
    assert abs(gamma_prime(5, PREC) - fd1) < mpf(10) ** -30
    assert abs(gamma_double_prime(4, PREC) - fd2) < mpf(10) ** -15
