import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mpf

from mertens.numkernel import precision
from mertens.primes import (
    PrimeLimitError,
    PrimeStore,
    omega_naive,
    omega_sieve,
    prime_array,
    simple_sieve,
)


def test_prime_counts():
    assert len(simple_sieve(100)) == 25
    assert len(prime_array(10**6, segment=1 << 16)) == 78498


def test_segmented_matches_simple():
    assert np.array_equal(prime_array(200_000, segment=4099), simple_sieve(200_000))


def test_omega_examples():
    blk = omega_sieve(1, 130)
    assert blk[1] == 0
    assert blk[12] == 3
    assert blk[30] == 3
    assert blk[64] == 6
    assert blk[97] == 1
    assert blk[128] == 7


@given(st.integers(min_value=1, max_value=10**6), st.integers(min_value=1, max_value=300))
def test_omega_sieve_matches_trial_division(lo, width):
    blk = omega_sieve(lo, lo + width)
    for n in range(lo, lo + width):
        assert blk[n] == omega_naive(n)


def test_mertens_prefix_exact_rounding():
    st_ = PrimeStore.compute(10**4, 128)
    with precision(160):
        ref = mpmath.fsum(mpf(1) / p for p in simple_sieve(10**4).tolist())
    assert abs(st_.mertens_prefix(10**4) - ref) <= st_.mertens_prefix_budget(10**4)


def test_logpow_small_example():
    st_ = PrimeStore.compute(1000, 128)
    with precision(160):
        ref = mpmath.fsum(mpmath.log(p) ** 2 / p for p in simple_sieve(100).tolist())
    assert abs(st_.logpow_prefix(2, 100) - ref) < 1e-14


def test_limit_is_enforced():
    st_ = PrimeStore.compute(1000, 128)
    assert st_.pi(1000) == 168
    with pytest.raises(PrimeLimitError):
        st_.pi(1001)


def test_cache_round_trip(tmp_path):
    a = PrimeStore.compute(50_000, 128)
    a.save(tmp_path)
    b = PrimeStore.load(50_000, 128, tmp_path)
    assert b is not None
    assert np.array_equal(a.primes, b.primes)
    assert b.recip_fixed == a.recip_fixed
    assert b.mertens_prefix(49_999) == a.mertens_prefix(49_999)


def test_corrupt_cache_is_detected(tmp_path):
    PrimeStore.compute(10_000, 128).save(tmp_path)
    binfile = next(tmp_path.glob("*.bin"))
    data = bytearray(binfile.read_bytes())
    data[-1] ^= 0xFF
    binfile.write_bytes(bytes(data))
    with pytest.raises(ValueError):
        PrimeStore.load(10_000, 128, tmp_path)
    # load_or_build falls back to a fresh sieve
    c = PrimeStore.load_or_build(10_000, 128, tmp_path)
    assert c.pi(10_000) == 1229


def test_float_prefix_close_to_exact():
    st_ = PrimeStore.compute(10**5, 128)
    F = st_.recip_prefix_float()
    idx = st_.pi(10**5)
    assert abs(F[idx] - float(st_.mertens_prefix(10**5))) < 1e-14
    assert math.isclose(st_.s1_float(np.array([10**5]))[0], F[idx])


def test_prime_count_1e8():
    st_ = PrimeStore.compute(10**8, 128)
    assert st_.pi(10**8) == 5761455


def test_omega_histogram_to_1e4():
    blk = omega_sieve(1, 10**4 + 1)
    hist = np.bincount(blk.omega)
    ref = np.bincount([omega_naive(n) for n in range(1, 10**4 + 1)])
    assert np.array_equal(hist, ref)


def test_mertens_sum_near_loglog_plus_beta(table):
    st_ = PrimeStore.compute(10**6, 192)
    with precision(192):
        gap = st_.mertens_prefix(10**6) - mpmath.log(mpmath.log(10**6)) - table.beta
    assert abs(gap) < 1e-3


def test_logpow_one_near_log_minus_alpha1(table):
    st_ = PrimeStore.compute(10**6, 192)
    with precision(192):
        gap = st_.logpow_prefix(1, 10**6) - (mpmath.log(10**6) - table.a(1))
    assert abs(gap) < 1e-2
