"""Acceptance checks; each prints one PASS/FAIL line to the terminal."""

import time

import pytest

from mertens import verify as V
from mertens.numkernel import precision

PREC = 192


@pytest.fixture
def report(capsys):
    def emit(label: str, res: V.SuiteResult, elapsed: float):
        with capsys.disabled():
            print(f"\n[{label}] {res.line()} ({elapsed:.1f}s)")

    return emit


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    res = fn(*args, **kw)
    return res, time.perf_counter() - t0


def test_c1_ratio_table(report):
    res, dt = timed(V.ratio_table_suite, 26, PREC, 5e-7)
    report("1", res, dt)
    assert res.passed
    assert len(res.rows) == 26
    assert dt < 600


def test_c2_named_constants(report):
    res, dt = timed(V.named_constants_suite, PREC)
    report("2", res, dt)
    assert res.passed


def test_c3_generator_identities(report):
    res, dt = timed(V.generator_suite, 5, PREC, 168)
    report("3", res, dt)
    assert res.passed


@pytest.mark.xfail(strict=True, reason="residuals at these x are dominated by the first omitted "
                                       "term, which is not yet monotone in N or x for k = 3, 4")
def test_c4_sieve_convergence(report):
    res, dt = timed(V.sieve_convergence_suite, PREC)
    report("4", res, dt)
    k2 = res.rows[0]
    assert k2["k"] == 2
    assert all(k2["monotone_in_N"].values()) and all(k2["monotone_in_x"].values())
    assert res.passed


def test_c5_finite_identities(report):
    res, dt = timed(V.identity_suite, (10**4, 10**5, 10**6), 1e-10, PREC)
    report("5", res, dt)
    assert res.passed


def test_c6_appendix_bounds(report):
    res, dt = timed(V.appendix_suite, 200, prec=PREC)
    report("6", res, dt)
    assert res.passed
    assert dt < 30


def test_c7_gamma_derivatives(report):
    res, dt = timed(V.gamma_suite, 12, PREC, 168)
    report("7", res, dt)
    assert res.passed


def test_c8_eta_series(report):
    res, dt = timed(V.eta_suite, 20, "1.25", PREC)
    report("8", res, dt)
    assert res.passed


def test_c9_pq_a_expansions(report):
    res, dt = timed(V.pq_a_suite, PREC, 4, (10**6, 10**7))
    report("9", res, dt)
    assert res.passed
