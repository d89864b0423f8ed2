"""Riemann zeta on the real axis, the prime zeta function, Stieltjes constants
and the Taylor coefficients eta_j of g(s) = -zeta'/zeta(s) - 1/(s-1) at s = 1.

Everything is built on one primitive, :func:`zeta_taylor`, which returns the
Taylor series of zeta(s0 + scale*v) in v by Euler-Maclaurin summation carried
out in power-series arithmetic.  The remainder after K Bernoulli corrections
is bounded by

    |R| <= 4 |(s)_{2K}| / (2 pi)^{2K} * N^{-(sigma + 2K - 1)} / (sigma + 2K - 1)

uniformly on the disc |v| <= 1/2; Cauchy's estimate turns that into a bound of
2^order times larger on each coefficient.  N and K are picked so the
coefficient bound drops below 2^-wp.

The prime zeta function uses the Moebius identity

    P(s) = sum_{m>=1} mu(m)/m * log zeta(m s)

with the primes below ``SMALL_PRIME_BOUND`` split off and summed directly, so
the m-sum converges like 101^(-m s) instead of 2^(-m s).
"""

from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass, field

import mpmath
from mpmath import mpf

from .numkernel import (
    PowerSeries,
    PrecisionError,
    check_prec,
    exp_linear,
    precision,
    series_deriv,
    series_div,
    series_log,
)

SMALL_PRIME_BOUND = 100
CAUCHY_RADIUS = mpf(1) / 2
MAX_STIELTJES = 48

_memo_lock = threading.Lock()


class DomainError(ValueError):
    pass


def _small_primes(n: int) -> list[int]:
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(n + 1) if sieve[i]]


_SMALL_PRIMES = _small_primes(SMALL_PRIME_BOUND)
_NEXT_PRIME = 101


def mobius(m: int) -> int:
    if m < 1:
        raise ValueError("mobius needs m >= 1")
    result, n, p = 1, m, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def _em_parameters(s0: mpf, scale: mpf, order: int, wp: int) -> tuple[int, int, mpf]:
    """Choose (N, K) for the Euler-Maclaurin remainder; returns the bound too."""
    with precision(64):
        rad = scale * CAUCHY_RADIUS
        smax = abs(s0) + rad
        sigma = s0 - rad
        target = mpf(2) ** (-wp - order)
        twopi2 = (2 * mpmath.pi) ** 2
        n = max(12, int((wp + order) * 0.12) + 4, int(abs(sigma)) + 4)
        while True:
            poch = mpf(1)
            for k in range(1, 4 * n + 1):
                poch *= (smax + 2 * k - 2) * (smax + 2 * k - 1) / twopi2
                denom = sigma + 2 * k - 1
                if denom <= 0:
                    continue
                bound = 4 * poch * mpf(n) ** (-denom) / denom
                if bound < target:
                    return n, k, bound
            n = int(n * 1.5) + 1


def _zeta_taylor_raw(s0: mpf, order: int, scale: mpf, wp: int) -> tuple[PowerSeries, mpf]:
    n_cut, k_cut, bound = _em_parameters(s0, scale, order, wp)
    with precision(wp):
        s0 = mpf(s0)
        scale = mpf(scale)
        pole = s0 == 1
        acc = [mpf(0)] * (order + 1)
        for n in range(1, n_cut):
            if n == 1:
                acc[0] += 1
                continue
            base = mpf(n) ** (-s0)
            rate = -scale * mpmath.log(n)
            term = base
            for i in range(order + 1):
                acc[i] += term
                term = term * rate / (i + 1)
        logn = mpmath.log(n_cut)
        expn = exp_linear(-scale * logn, order)
        # N^{-s}/2 and the Bernoulli corrections share the factor exp(-scale v log N)
        corr = [mpf(0)] * (order + 1)
        corr[0] = mpf(n_cut) ** (-s0) / 2
        poly = [mpf(0)] * (order + 1)  # (s)_{2k-1} as a polynomial in v
        poly[0] = s0
        if order >= 1:
            poly[1] = scale
        npow = mpf(n_cut) ** (-s0 - 1)
        nsq = mpf(n_cut) ** -2
        for k in range(1, k_cut + 1):
            coef = mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) * npow
            for i in range(order + 1):
                corr[i] += coef * poly[i]
            for shift in (2 * k - 1, 2 * k):
                root = s0 + shift
                for i in range(order, 0, -1):
                    poly[i] = poly[i] * root + poly[i - 1] * scale
                poly[0] = poly[0] * root
            npow *= nsq
        corr_series = PowerSeries(tuple(corr)) * expn
        for i in range(order + 1):
            acc[i] += corr_series[i]
        if pole:
            # (N^{-scale v} - 1)/(scale v), the 1/(scale v) pole removed
            term = -logn
            for i in range(order + 1):
                acc[i] += term
                term = term * (-logn) * scale / (i + 2)
        else:
            inv = []
            q = 1 / (s0 - 1)
            for i in range(order + 1):
                inv.append(q)
                q = q * (-scale) / (s0 - 1)
            head = PowerSeries(tuple(inv)) * expn * (mpf(n_cut) ** (1 - s0))
            for i in range(order + 1):
                acc[i] += head[i]
        return PowerSeries(tuple(acc), f"zeta@{mpmath.nstr(s0, 8)}"), bound


@functools.lru_cache(maxsize=4096)
def _zeta_taylor_cached(s0: mpf, order: int, scale: mpf, wp: int) -> PowerSeries:
    return _zeta_taylor_raw(s0, order, scale, wp)[0]


def zeta_taylor(s0, order: int, scale=1, prec: int | None = None) -> PowerSeries:
    """Taylor series in v of zeta(s0 + scale*v), coefficients absolute to ~2^-prec.

    For s0 == 1 the pole 1/(scale*v) is removed, so the result is the series of
    the regular part zeta(1 + scale v) - 1/(scale v).
    """
    prec = check_prec(prec)
    s0, scale = mpf(s0), mpf(scale)
    if s0 < 1:
        raise DomainError(f"zeta_taylor expects s0 >= 1, got {s0}")
    if scale <= 0:
        raise ValueError("scale must be positive")
    return _zeta_taylor_cached(s0, int(order), scale, prec + 16)


def zeta(s, prec: int | None = None) -> mpf:
    """zeta(s) for real s > 1."""
    prec = check_prec(prec)
    with precision(prec + 16):
        s = mpf(s)
    if s <= 1:
        raise DomainError(f"zeta(s) is implemented for s > 1, got {s}")
    val = zeta_taylor(s, 0, 1, prec)[0]
    with precision(prec):
        return +val


@functools.lru_cache(maxsize=256)
def zeta_int(n: int, prec: int) -> mpf:
    """zeta(n) for integer n >= 2 (memoized)."""
    return zeta(n, prec)


# ---------------------------------------------------------------------------
# prime zeta and its derivatives


def _tail_coefficient_bound(u: float, sigma: float, order: int) -> float:
    """log2 of max_i (sigma^i/i!) sum_{n>N0} log(n)^i n^-u."""
    n0 = SMALL_PRIME_BOUND
    ln0 = math.log(n0)
    best = -math.inf
    for i in range(order + 1):
        # integral part: Gamma(i+1, (u-1) log N0) / (u-1)^(i+1)
        z = (u - 1) * ln0
        g = float(mpmath.log(mpmath.gammainc(i + 1, z), 2)) - (i + 1) * math.log2(u - 1)
        tpeak = max(ln0, i / u)
        peak = i * math.log2(tpeak) - u * tpeak / math.log(2) if i else -u * ln0 / math.log(2)
        tot = max(g, peak) + 1
        val = tot + i * math.log2(sigma) - math.lgamma(i + 1) / math.log(2)
        best = max(best, val)
    return best


def _log_zeta_tail_series(u: mpf, sigma: mpf, order: int, wp: int) -> PowerSeries:
    """Series in v of log zeta(u + sigma v) + sum_{p<=N0} log(1 - p^-(u + sigma v)).

    Expanding -log(1 - x e^{-sigma v log p}) with x = p^-u, the coefficient of
    v^i is (-sigma log p)^i / i! * sum_r r^(i-1) x^r, and that inner sum is
    Li_{1-i}(x) (-log(1-x) for i = 0), a rational function of x.
    """
    zs = _zeta_taylor_cached(mpf(u), order, mpf(sigma), wp)
    with precision(wp):
        lz = list(series_log(zs).coeffs)
        for p in _SMALL_PRIMES:
            x = mpf(p) ** (-u)
            rate = -sigma * mpmath.log(p)
            lz[0] += mpmath.log1p(-x)
            scale = mpf(1)
            for i in range(1, order + 1):
                scale = scale * rate / i
                lz[i] -= scale * _li_neg_rational(i - 1, x)
        return PowerSeries(tuple(lz))


def _li_neg_rational(k: int, x: mpf) -> mpf:
    """Li_{-k}(x) = x A_k(x) / (1-x)^(k+1), A_k the Eulerian polynomial."""
    from .polylog import eulerian_row

    poly = mpf(0)
    for c in reversed(eulerian_row(k)):
        poly = poly * x + c
    return x * poly / (1 - x) ** (k + 1)


@dataclass(frozen=True)
class PrimeZetaColumn:
    """alpha_{j,a} = sum_p log(p)^j / p^a for j = 0..order at fixed a."""

    a: mpf
    values: tuple
    budget: tuple
    prec: int
    mobius_terms: int = 0


def _prime_zeta_column(a: mpf, order: int, prec: int) -> PrimeZetaColumn:
    a = mpf(a)
    scale = a - 1
    extra = int(min(float(a), 4 * prec)) if a > 1 else 0
    wp = prec + 40 + extra
    tail = [mpf(0)] * (order + 1)
    used = 0
    below = 0
    m = 1
    with precision(wp):
        while below < 3:
            u, sig = m * a, m * scale
            lb = _tail_coefficient_bound(float(u), float(sig), order)
            if lb < -wp:
                below += 1
                m += 1
                continue
            below = 0
            mu = mobius(m)
            if mu:
                ser = _log_zeta_tail_series(u, sig, order, wp)
                # log zeta(m a + m c v) enters P(a + c v) with weight mu(m)/m
                for i in range(order + 1):
                    tail[i] += mu * ser[i] / m
                used += 1
            m += 1
        values, budget = [], []
        fact = mpf(1)
        for j in range(order + 1):
            if j:
                fact *= j
            direct = mpmath.fsum(mpmath.log(p) ** j * mpf(p) ** (-a) for p in _SMALL_PRIMES)
            conv = fact / scale**j
            t = tail[j] * conv * (-1) ** j
            values.append(direct + t)
            budget.append(conv * mpf(2) ** (-prec - 32) + abs(direct + t) * mpf(2) ** (-prec))
    with precision(prec):
        return PrimeZetaColumn(a, tuple(+v for v in values), tuple(+b for b in budget), prec, used)


@functools.lru_cache(maxsize=2048)
def prime_zeta_column(a, order: int, prec: int) -> PrimeZetaColumn:
    """alpha_{j,a} for j <= order, i.e. (-1)^j P^{(j)}(a)."""
    a = mpf(a)
    if a <= 1:
        raise DomainError(f"prime zeta needs s > 1, got {a}")
    return _prime_zeta_column(a, order, prec)


def prime_zeta(s, prec: int | None = None) -> mpf:
    """P(s) = sum_p p^-s for real s > 1."""
    prec = check_prec(prec)
    with precision(prec + 16):
        s = mpf(s)
    if s <= 1:
        raise DomainError(f"prime_zeta(s) is implemented for s > 1, got {s}")
    return prime_zeta_column(s, 0, prec).values[0]


def prime_zeta_mobius(s, prec: int | None = None) -> mpf:
    """P(s) from the bare identity sum_m mu(m)/m log zeta(m s), no prime split.

    Kept as an independent route for cross-checks; converges like 2^-(m s).
    """
    prec = check_prec(prec)
    wp = prec + 24
    with precision(wp):
        s = mpf(s)
        if s <= 1:
            raise DomainError(f"prime_zeta(s) is implemented for s > 1, got {s}")
        total = mpf(0)
        m = 1
        while True:
            lz = mpmath.log(zeta(m * s, wp))
            mu = mobius(m)
            if mu:
                total += mu * lz / m
            if m > 1 and abs(lz) < mpf(2) ** (-wp):
                break
            m += 1
    with precision(prec):
        return +total


# ---------------------------------------------------------------------------
# Stieltjes constants and eta_j


@functools.lru_cache(maxsize=64)
def _stieltjes_cached(n_max: int, prec: int) -> tuple:
    scale = mpf(max(1, n_max // 4))
    wp = prec + 32
    for _ in range(2):
        reg = _zeta_taylor_cached(mpf(1), n_max, scale, wp)
        with precision(wp):
            gam, lost = [], 0.0
            fact = mpf(1)
            for n in range(n_max + 1):
                if n:
                    fact *= n
                g = (-1) ** n * fact * reg[n] / scale**n
                gam.append(g)
                if g != 0:
                    lost = max(lost, float(mpmath.log(fact / scale**n / abs(g), 2)))
        need = prec + 32 + max(0, int(math.ceil(lost)))
        if need <= wp:
            with precision(prec):
                return tuple(+g for g in gam)
        if need > 8 * prec:
            raise PrecisionError(
                f"stieltjes({n_max}) would need about {need} working bits; "
                f"raise prec_bits above {need // 8}"
            )
        wp = need
    with precision(prec):
        return tuple(+g for g in gam)


def stieltjes(n_max: int, prec: int | None = None) -> tuple:
    """gamma_0 .. gamma_{n_max}: Laurent coefficients of zeta at s = 1.

    zeta(s) = 1/(s-1) + sum_n (-1)^n gamma_n (s-1)^n / n!
    """
    prec = check_prec(prec)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if n_max > MAX_STIELTJES:
        raise PrecisionError(f"n_max <= {MAX_STIELTJES} supported, got {n_max}")
    return _stieltjes_cached(int(n_max), prec)


@dataclass(frozen=True)
class EtaTable:
    values: tuple
    J: int
    stieltjes_used: tuple = field(repr=False)
    prec: int = 192

    def __getitem__(self, j: int) -> mpf:
        return self.values[j]

    def evaluate(self, s, upto: int | None = None) -> mpf:
        """Partial sum sum_{j<=upto} eta_j (s-1)^j."""
        upto = self.J if upto is None else upto
        with precision(self.prec + 16):
            w = mpf(s) - 1
            return mpmath.fsum(self.values[j] * w**j for j in range(upto + 1))


@functools.lru_cache(maxsize=32)
def _eta_cached(J: int, prec: int) -> EtaTable:
    gam = stieltjes(J, prec)
    with precision(prec + 32):
        # A(w) = w zeta(1+w) = 1 + sum_n (-1)^n gamma_n w^{n+1}/n!
        a = [mpf(1)]
        fact = mpf(1)
        for n, g in enumerate(gam):
            if n:
                fact *= n
            a.append((-1) ** n * g / fact)
        A = PowerSeries(tuple(a))
        # g(s) = -zeta'/zeta - 1/(s-1) = -A'/A
        ratio = series_div(series_deriv(A), A.truncate(J))
        vals = tuple(-c for c in ratio.coeffs)
    with precision(prec):
        return EtaTable(tuple(+v for v in vals), J, gam, prec)


def eta_coeffs(J: int, prec: int | None = None) -> EtaTable:
    prec = check_prec(prec)
    if J < 0:
        raise ValueError("J must be >= 0")
    if J > MAX_STIELTJES:
        raise PrecisionError(f"eta_coeffs needs Stieltjes constants up to {J}; max {MAX_STIELTJES}")
    return _eta_cached(int(J), prec)


def log_zeta_derivative_direct(s, prec: int | None = None) -> mpf:
    """-zeta'(s)/zeta(s) from the order-1 Taylor series (test helper route)."""
    prec = check_prec(prec)
    ser = zeta_taylor(s, 1, 1, prec)
    with precision(prec):
        return -ser[1] / ser[0]


def log_zeta_derivative_fd(s, prec: int | None = None) -> mpf:
    """-zeta'(s)/zeta(s) by a central difference of log zeta at spacing 2^(-prec/3).

    Uses only point values of zeta, so it shares no series with the eta table.
    """
    prec = check_prec(prec)
    wp = prec + prec // 3 + 16
    with precision(wp):
        s = mpf(s)
        h = mpf(2) ** (-(prec // 3))
        d = (mpmath.log(zeta(s + h, wp)) - mpmath.log(zeta(s - h, wp))) / (2 * h)
    with precision(prec):
        return -d


class ReferenceDataError(RuntimeError):
    pass


def load_stieltjes_reference() -> dict:
    """Frozen reference values {n: gamma_n} shipped in testdata, checksum verified."""
    import hashlib
    from importlib import resources

    base = resources.files("mertens") / "testdata"
    data = (base / "stieltjes_ref.txt").read_bytes()
    want = (base / "stieltjes_ref.sha256").read_text().split()[0]
    if hashlib.sha256(data).hexdigest() != want:
        raise ReferenceDataError("stieltjes_ref.txt does not match its sha256 manifest")
    out = {}
    for line in data.decode().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        n, val = line.split()
        out[int(n)] = val
    return out
