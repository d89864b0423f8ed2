import mpmath
import pytest
from mpmath import mpf

from mertens.constants import (
    alpha,
    alpha_ja,
    alpha_sum_pp1,
    alpha_via_convergent_formula,
    beta_direct,
    d_jk,
    ratio_normalizer,
    rh_refinement_diagnostic,
)
from mertens.numkernel import hp, precision
from mertens.oracle import alpha_limit_estimate, d_jk_quadrature

PREC = 192

# published digits of alpha_1 and beta
MERTENS_E = "1.3325822757332208817658"
BETA_PUB = "0.26149721284764278375"


def test_alpha1_known_value(table):
    with precision(PREC):
        assert abs(table.a(1) - hp(MERTENS_E, PREC)) < mpf(10) ** -17


def test_beta_known_value(table):
    with precision(PREC):
        assert abs(table.beta - hp(BETA_PUB, PREC)) < mpf(10) ** -20
        assert table.beta < table.gamma


def test_beta_sieve_route(table, store7):
    est = beta_direct(10**7, PREC, store7)
    assert abs(est.value - table.beta) <= est.budget


def test_alpha_sum_pp1_links_alpha1_and_gamma(table):
    # alpha_1 = gamma + sum_p log p / (p (p - 1)); the left side comes from the eta route
    est = alpha_sum_pp1(1, PREC)
    with precision(PREC):
        assert abs(table.gamma + est.value - table.a(1)) < mpf(2) ** -160


def test_alpha_ja_small_example():
    # sum_p log p / p^3 from a direct prime sum; the tail past 10^4 is below 1e-7
    from mertens.primes import simple_sieve

    with precision(80):
        head = mpmath.fsum(mpmath.log(p) / mpf(p) ** 3 for p in simple_sieve(10**4).tolist())
    val = alpha_ja(1, 3, prec=PREC)
    assert 0 < val - head < 1e-7


def test_alpha_ja_ratio_bounds():
    # alpha_{j,3} / alpha_{j,2} < 1 because every term shrinks by 1/p
    for j in (1, 3, 6):
        assert alpha_ja(j, 3, prec=PREC) < alpha_ja(j, 2, prec=PREC) / 2


def test_d22_against_quadrature(store7):
    val = d_jk(2, 2, PREC)
    q = d_jk_quadrature(2, 2, store=store7)
    assert abs(val - q.value) < 1e-8
    assert abs(val - q.value) <= q.abs_error_budget


def test_convergent_formula_route(table, store7):
    for j in (1, 3):
        est = alpha_via_convergent_formula(j, 10**7, PREC, store7)
        assert abs(est.value - table.a(j)) < 1e-4


def test_alpha_limit_partial_sum(table, store7):
    # the defining limit converges slowly; at 10^7 it is within a few 1e-4
    r = alpha_limit_estimate(1, 10**7, PREC, store7)
    assert abs(r.value - table.a(1)) < 1e-3


def test_ratio_approaches_one_from_above():
    rows = [alpha(j, PREC) / ratio_normalizer(j) for j in range(15, 21)]
    for a, b in zip(rows, rows[1:]):
        assert 1 < b < a


def test_refinement_diagnostic_shape():
    out = rh_refinement_diagnostic(range(18, 21), PREC)
    assert [row[0] for row in out] == [18, 19, 20]
    assert all(row[2] > 0 for row in out)


def test_precision_stability():
    a = alpha(5, 192)
    b = alpha(5, 256)
    assert abs(a - b) <= mpf(2) ** -170 * abs(b)


def test_alpha12_two_prime_limits(table, store7):
    import math

    import numpy as np

    val = float(table.aja(1, 2))
    for X in (10**6, 10**7):
        p = store7.primes_upto(X).astype(np.float64)
        head = math.fsum((np.log(p) / p**2).tolist())
        # theta(t) <= 1.01624 t bounds the tail by 2.04 / X
        assert head < val < head + 2.04 / X


def test_alpha_j3_approaches_gamma_shape():
    vals = [alpha_ja(j, 3, prec=PREC) * mpf(2) ** j / mpmath.factorial(j - 1) for j in range(10, 41)]
    assert all(a < b < 1 for a, b in zip(vals, vals[1:]))
    assert 1 - vals[-1] < 1e-4


def test_d12_reconstructs_alpha12(table, store7):
    q = d_jk_quadrature(1, 2, store=store7)
    with precision(PREC):
        recon = table.P(2) * mpmath.log(2) + q.value
    assert abs(recon - table.aja(1, 2)) <= q.abs_error_budget
    with precision(PREC):
        assert abs(d_jk(1, 2, PREC) + table.P(2) * mpmath.log(2) - table.aja(1, 2)) < mpf(2) ** -180


def test_ratio_at_ten():
    r = alpha(10, PREC) / ratio_normalizer(10)
    assert mpf("1.040343") <= r < mpf("1.040344")


def test_convergent_formula_at_one_is_gamma_plus_prime_sum(table, store7):
    est = alpha_via_convergent_formula(1, 10**7, PREC, store7)
    assert abs(est.value - (table.gamma + alpha_sum_pp1(1, PREC).value)) < 1e-6


def test_prime_sum_pp1_direct(store7):
    import math

    import numpy as np

    X = 10**7
    p = store7.primes_upto(X).astype(np.float64)
    head = math.fsum((np.log(p) ** 2 / (p * (p - 1))).tolist())
    val = float(alpha_sum_pp1(2, PREC).value)
    # tail: about log X / X by the prime number theorem
    assert head < val < head + 3 * math.log(X) / X


def test_beta_sieve_window_shrinks(table):
    from mertens.primes import PrimeStore

    st_ = PrimeStore.compute(10**8, PREC)
    gaps = []
    with precision(PREC):
        for x in (10**7, 10**8):
            gaps.append(abs(st_.mertens_prefix(x) - mpmath.log(mpmath.log(x)) - table.beta))
    assert gaps[1] < gaps[0] < 1e-5
