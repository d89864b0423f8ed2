import math

import mpmath
import pytest
from mpmath import mpf

from mertens.numkernel import PrecisionError, hp, precision
from mertens.primes import simple_sieve
from mertens.zetaprime import (
    DomainError,
    eta_coeffs,
    load_stieltjes_reference,
    log_zeta_derivative_direct,
    mobius,
    prime_zeta,
    prime_zeta_column,
    prime_zeta_mobius,
    stieltjes,
    zeta,
    zeta_int,
    zeta_taylor,
)

PREC = 192


def test_zeta_even_values():
    with precision(PREC):
        assert abs(zeta_int(2, PREC) - mpmath.pi**2 / 6) < mpf(2) ** -185
        assert abs(zeta_int(4, PREC) - mpmath.pi**4 / 90) < mpf(2) ** -185


def test_zeta_taylor_derivative():
    ser = zeta_taylor(2, 2, 1, PREC)
    with precision(PREC):
        assert abs(ser[1] - mpmath.zeta(2, derivative=1)) < mpf(10) ** -50
        assert abs(ser[2] - mpmath.zeta(2, derivative=2) / 2) < mpf(10) ** -50


def test_zeta_at_pole_is_rejected():
    with pytest.raises((DomainError, ValueError)):
        zeta(1, PREC)


def test_mobius():
    assert [mobius(n) for n in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]


def test_prime_zeta_four_envelope():
    # P(4) lies between the first term and the sum over all integers >= 2
    p4 = prime_zeta(4, PREC)
    assert mpf(1) / 16 + mpf(1) / 81 < p4 < zeta_int(4, PREC) - 1
    with precision(PREC):
        assert abs(p4 - mpf("0.0769931397642468449426")) < mpf(10) ** -21


def test_prime_zeta_two_routes_agree():
    for s in (2, 3, mpf("2.5")):
        assert abs(prime_zeta(s, PREC) - prime_zeta_mobius(s, PREC)) < mpf(10) ** -50


def test_prime_zeta_column_against_direct_partial_sum():
    col = prime_zeta_column(3, 2, PREC)
    with precision(80):
        head = mpmath.fsum(mpmath.log(p) ** 2 / mpf(p) ** 3 for p in simple_sieve(2000).tolist())
    # tail of sum_p log^2 p / p^3 beyond 2000 is far below 1e-5
    assert abs(col.values[2] - head) < 1e-5
    assert col.values[2] > head


def test_stieltjes_against_frozen_reference():
    ref = load_stieltjes_reference()
    gam = stieltjes(19, PREC)
    for n, s in ref.items():
        s = hp(s, PREC)
        assert abs(gam[n] - s) <= mpf(10) ** -45 * max(1, abs(s))


def test_stieltjes_bounds():
    with pytest.raises(PrecisionError):
        stieltjes(10_000, PREC)


def test_eta_constant_is_minus_gamma():
    eta = eta_coeffs(10, PREC)
    with precision(PREC):
        assert abs(eta[0] + mpmath.euler) < mpf(2) ** -180


@pytest.mark.parametrize("s", ["1.25", "1.5", "1.75"])
def test_eta_series_matches_log_derivative(s):
    eta = eta_coeffs(40, PREC)
    s = hp(s, PREC)
    with precision(PREC):
        direct = log_zeta_derivative_direct(s, PREC) - 1 / (s - 1)
    assert abs(eta.evaluate(s) - direct) < mpf(10) ** -12


def test_eta_precision_doubling_is_stable():
    a = eta_coeffs(20, 192)
    b = eta_coeffs(20, 384)
    for j in range(21):
        assert abs(a[j] - b[j]) <= mpf(2) ** -170 * max(1, abs(b[j]))


def test_zeta3_against_direct_sum():
    import numpy as np

    n = 10**6
    head = math.fsum((1.0 / np.arange(1, n + 1, dtype=np.float64) ** 3).tolist())
    # Euler-Maclaurin tail past n: 1/(2 n^2) - 1/(2 n^3) + 1/(4 n^4)
    approx = head + 1 / (2 * n**2) - 1 / (2 * n**3) + 1 / (4 * n**4)
    assert abs(float(zeta_int(3, PREC)) - approx) < 1e-14
    assert mpmath.nstr(zeta_int(3, PREC), 25).startswith("1.2020569031595942853997")


@pytest.mark.parametrize("s", [2, 3])
def test_prime_zeta_against_prime_sum(store7, s):
    import numpy as np

    X = 10**7
    p = store7.primes_upto(X).astype(np.float64)
    head = math.fsum((p ** (-s)).tolist())
    # pi(t) <= 1.26 t / log t gives sum_{p > X} p^-s <= 1.26 s X^(1-s) / ((s-1) log X)
    tail = 1.26 * s * X ** (1 - s) / ((s - 1) * math.log(X))
    val = float(prime_zeta(s, PREC))
    assert head - 1e-15 <= val <= head + tail


def test_stieltjes_leading_values():
    gam = stieltjes(2, PREC)
    assert abs(float(gam[0]) - 0.5772156649) < 1e-10
    assert abs(float(gam[1]) + 0.0728158) < 1e-7


def test_stieltjes_precision_doubling():
    a = stieltjes(19, 192)
    b = stieltjes(19, 384)
    for x, y in zip(a, b):
        assert abs(x - y) <= mpf(2) ** (16 - 192) * max(1, abs(y))


def test_eta_near_one_and_envelope():
    eta = eta_coeffs(40, PREC)
    s = hp("1.001", PREC)
    with precision(PREC):
        g = log_zeta_derivative_direct(s, PREC) - 1 / (s - 1)
    assert abs(g - eta[0]) < 1e-3
    assert abs(g - eta.evaluate(s)) < mpf(10) ** -40
    # eta_j (2.9)^j stays bounded over the computed range
    assert max(abs(eta[j]) * mpf("2.9") ** j for j in range(41)) < 1


def test_eta_stable_when_order_and_precision_double():
    a = eta_coeffs(20, 192)
    b = eta_coeffs(40, 384)
    for j in range(21):
        assert abs(a[j] - b[j]) < mpf(2) ** -96


def test_log_derivative_two_routes():
    from mertens.zetaprime import log_zeta_derivative_fd

    for s in ("1.25", "2", "3.5"):
        s = hp(s, PREC)
        assert abs(log_zeta_derivative_fd(s, PREC) - log_zeta_derivative_direct(s, PREC)) < mpf(10) ** -30
    eta = eta_coeffs(20, PREC)
    s = hp("1.25", PREC)
    with precision(PREC):
        g = log_zeta_derivative_fd(s, PREC) - 1 / (s - 1)
    assert abs(g - eta.evaluate(s)) < 1e-10
