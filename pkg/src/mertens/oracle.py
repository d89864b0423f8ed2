"""Brute-force oracles: sieve R_k(x), ordered-tuple S_k(x), sum 1/(p q^a) and friends.

Everything here is evaluated from primes and Omega counts directly, never
from the expansions, so the expansion code can be tested against it.

Floating-point conventions: individual reciprocals are doubles; sums use
math.fsum (exactly rounded), so the budget is the term rounding plus the
error of the double-precision S_1 table.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mpf

from .numkernel import check_prec, precision
from .primes import PREFIX_BLOCK, PrimeStore, get_store, omega_sieve, simple_sieve

RK_CEILING = 10**8
RK_STREAM_CEILING = 10**9
SK_CEILINGS = {1: 10**9, 2: 10**8, 3: 10**7, 4: 10**6}
SEGMENT = 1 << 21
EPS = 2.0**-53
# error of one recip_prefix_float entry (values stay below 4)
S1_EPS = (PREFIX_BLOCK + 2) * 4 * EPS


class OracleLimitError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    quantity: str
    x: int
    k_or_j: int
    value: mpf
    abs_error_budget: float
    wall_time: float

    def __float__(self) -> float:
        return float(self.value)


def _result(quantity: str, x: int, k: int, value, budget: float, t0: float, prec: int) -> OracleResult:
    with precision(prec):
        v = mpf(value)
    return OracleResult(quantity, int(x), int(k), v, max(float(budget), 2.0**-60), time.perf_counter() - t0)


def _store(x: int, store: PrimeStore | None, prec: int) -> PrimeStore:
    if store is not None and store.limit >= x:
        return store
    return get_store(max(int(x), 1000), prec, use_cache=False)


# ---------------------------------------------------------------------------
# R_k from the Omega sieve

_RK_CACHE: dict = {}


def _rk_all(x: int) -> tuple[dict, float]:
    """{k: R_k(x)} for every k that occurs, plus the common budget."""
    if x in _RK_CACHE:
        return _RK_CACHE[x]
    base = simple_sieve(math.isqrt(x) + 1)
    parts: dict = {}
    for lo in range(1, x + 1, SEGMENT):
        hi = min(lo + SEGMENT, x + 1)
        om = omega_sieve(lo, hi, base).omega
        inv = 1.0 / np.arange(lo, hi, dtype=np.float64)
        order = np.argsort(om, kind="stable")
        counts = np.bincount(om)
        start = 0
        for k, c in enumerate(counts.tolist()):
            if c:
                parts.setdefault(k, []).append(math.fsum(inv[order[start : start + c]].tolist()))
            start += c
    sums = {k: math.fsum(v) for k, v in parts.items()}
    nseg = -(-x // SEGMENT)
    # each 1/n is rounded once, each partial sum once more
    budget = 2 * ((math.log(x) + 1) * EPS + nseg * 4 * EPS)
    _RK_CACHE[x] = (sums, budget)
    return sums, budget


def rk_sieve(k: int, x: int, prec: int | None = None, streaming: bool = False) -> OracleResult:
    """sum of 1/n over n <= x with Omega(n) = k."""
    prec = check_prec(prec)
    t0 = time.perf_counter()
    x = int(x)
    if k < 0:
        raise ValueError("k must be >= 0")
    ceiling = RK_STREAM_CEILING if streaming else RK_CEILING
    if x > ceiling:
        raise OracleLimitError(
            f"x = {x} is above the R_k ceiling {ceiling}; pass streaming=True (ceiling {RK_STREAM_CEILING})"
        )
    if x < 1:
        return _result("R_k", x, k, 0, 0, t0, prec)
    sums, budget = _rk_all(x)
    return _result("R_k", x, k, sums.get(k, 0.0), budget, t0, prec)


def rk_trial_division(k: int, x: int) -> float:
    """Slow reference: factor every n <= x by trial division."""
    from .primes import omega_naive

    return math.fsum(1.0 / n for n in range(1, x + 1) if omega_naive(n) == k)


# ---------------------------------------------------------------------------
# S_k as ordered prime tuples


def _s2_vec(z: np.ndarray, st: PrimeStore) -> tuple[np.ndarray, np.ndarray]:
    """S_2(z) for an integer array, by the hyperbola identity
    S_2(z) = 2 sum_{r <= sqrt z} S_1(z/r)/r - S_1(sqrt z)^2.

    Returns values and per-entry error bounds.
    """
    z = np.asarray(z, dtype=np.int64)
    out = np.zeros(len(z))
    if not len(z):
        return out, out.copy()
    root = np.floor(np.sqrt(z.astype(np.float64))).astype(np.int64)
    # repair float sqrt at perfect squares
    root -= (root * root > z).astype(np.int64)
    root += ((root + 1) * (root + 1) <= z).astype(np.int64)
    s_root = st.s1_float(root)
    rmax = int(root.max())
    acc = np.zeros(len(z))
    for r in st.primes_upto(max(rmax, 1)).tolist():
        mask = root >= r
        if not mask.any():
            break
        acc[mask] += st.s1_float(z[mask] // r) / r
    out = 2 * acc - s_root * s_root
    # 2 sum_r 1/r <= 2 S_1(sqrt z) + 2 bounds the weight on S_1 errors;
    # the running sum over r adds one rounding per prime
    nr = len(st.primes_upto(max(rmax, 1))) + 4
    err = (4 * s_root + 4) * S1_EPS + nr * EPS * (2 * acc + s_root * s_root)
    return out, err


def _tuple_products(x: int, depth: int, st: PrimeStore, reserve: int) -> tuple[np.ndarray, np.ndarray]:
    """All ordered products p_1...p_depth with product * 2^reserve <= x, and their reciprocals."""
    prods = np.array([1], dtype=np.int64)
    for level in range(depth):
        rem = depth - level - 1 + reserve
        cap = x >> rem
        chunks = []
        for p in st.primes_upto(max(cap // 1, 2)).tolist():
            sel = prods[prods * p <= cap]
            if not len(sel):
                break
            chunks.append(sel * p)
        prods = np.concatenate(chunks) if chunks else np.array([], dtype=np.int64)
    return prods, 1.0 / prods.astype(np.float64)


def sk_recursive(k: int, x: int, prec: int | None = None, store: PrimeStore | None = None,
                 enforce_ceiling: bool = True) -> OracleResult:
    """S_k(x) = sum_{p <= x/2^(k-1)} S_{k-1}(x/p)/p, unrolled down to S_2.

    The outer k-2 primes are enumerated as ordered tuples; S_2 of the
    remaining range comes from :func:`_s2_vec`; S_1 from the prime store.
    """
    prec = check_prec(prec)
    t0 = time.perf_counter()
    x = int(x)
    if not 1 <= k <= 4:
        raise ValueError("sk_recursive supports 1 <= k <= 4")
    if enforce_ceiling and x > SK_CEILINGS[k]:
        raise OracleLimitError(f"x = {x} is above the S_{k} ceiling {SK_CEILINGS[k]}")
    st = _store(x, store, prec)
    if k == 1:
        return _result("S_k", x, 1, st.mertens_prefix(x), float(st.mertens_prefix_budget(x)), t0, prec)
    prods, w = _tuple_products(x, k - 2, st, 1)
    vals, errs = _s2_vec(x // prods, st)
    terms = (w * vals).tolist()
    value = math.fsum(terms)
    budget = float(np.sum(w * errs)) + 3 * EPS * math.fsum(map(abs, terms))
    return _result("S_k", x, k, value, budget, t0, prec)


def sk_double_loop(x: int) -> float:
    """S_2 by brute force over prime pairs (for small x)."""
    ps = simple_sieve(x // 2).tolist()
    return math.fsum(1.0 / (p * q) for p in ps for q in ps if p * q <= x)


# ---------------------------------------------------------------------------
# the mixed sums in the R_3 and R_4 decompositions


def pq_a_sum(a: int, x: int, prec: int | None = None, store: PrimeStore | None = None) -> OracleResult:
    """sum over ordered primes (p, q) with p q^a <= x of 1/(p q^a), p = q included."""
    prec = check_prec(prec)
    t0 = time.perf_counter()
    if a < 2:
        raise ValueError("a must be >= 2")
    x = int(x)
    st = _store(x, store, prec)
    qs = st.primes_upto(max(2, int((x / 2) ** (1.0 / a)) + 2)).astype(np.int64)
    qa = qs**a
    qs, qa = qs[2 * qa <= x], qa[2 * qa <= x]
    if not len(qs):
        return _result("pq^a", x, a, 0, 0, t0, prec)
    w = 1.0 / qa.astype(np.float64)
    s1 = st.s1_float(x // qa)
    terms = (w * s1).tolist()
    value = math.fsum(terms)
    budget = float(np.sum(w)) * S1_EPS + 3 * EPS * value
    return _result("pq^a", x, a, value, budget, t0, prec)


def p2qr_sum(x: int, prec: int | None = None, store: PrimeStore | None = None) -> OracleResult:
    """sum_{p^2 q r <= x} 1/(p^2 q r) = sum_{p <= sqrt(x/4)} S_2(x/p^2)/p^2."""
    prec = check_prec(prec)
    t0 = time.perf_counter()
    x = int(x)
    st = _store(x, store, prec)
    ps = st.primes_upto(max(2, math.isqrt(x // 4))).astype(np.int64)
    ps = ps[4 * ps * ps <= x]
    w = 1.0 / (ps * ps).astype(np.float64)
    vals, errs = _s2_vec(x // (ps * ps), st)
    terms = (w * vals).tolist()
    value = math.fsum(terms)
    budget = float(np.sum(w * errs)) + 3 * EPS * value
    return _result("p^2qr", x, 4, value, budget, t0, prec)


def p2q2_sum(x: int, prec: int | None = None) -> OracleResult:
    """sum over ordered (p, q) with p^2 q^2 <= x."""
    prec = check_prec(prec)
    t0 = time.perf_counter()
    x = int(x)
    ps = simple_sieve(max(2, math.isqrt(x // 4))).tolist()
    terms = [1.0 / (p * p * q * q) for p in ps for q in ps if p * p * q * q <= x]
    value = math.fsum(terms)
    return _result("p^2q^2", x, 4, value, 3 * EPS * value + EPS, t0, prec)


def prime_power_sum(a: int, x: int, prec: int | None = None) -> OracleResult:
    """sum_{p^a <= x} p^-a."""
    prec = check_prec(prec)
    t0 = time.perf_counter()
    x = int(x)
    top = int(round(x ** (1.0 / a))) + 2
    ps = [p for p in simple_sieve(max(top, 2)).tolist() if p**a <= x]
    value = math.fsum(1.0 / p**a for p in ps)
    return _result("p^a", x, a, value, 3 * EPS * value + EPS, t0, prec)


# ---------------------------------------------------------------------------
# identity suites


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    x: int
    lhs: float
    rhs: float
    budget: float

    @property
    def diff(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        return self.diff <= self.budget


def identity_r3(x: int, prec: int | None = None, store: PrimeStore | None = None) -> IdentityCheck:
    """R_3 = S_3/6 + (1/2) sum 1/(p q^2) + (1/3) sum 1/p^3, exactly at finite x."""
    r = rk_sieve(3, x, prec)
    s = sk_recursive(3, x, prec, store, enforce_ceiling=False)
    pq = pq_a_sum(2, x, prec, store)
    p3 = prime_power_sum(3, x, prec)
    rhs = math.fsum([float(s.value) / 6, float(pq.value) / 2, float(p3.value) / 3])
    budget = (r.abs_error_budget + s.abs_error_budget / 6 + pq.abs_error_budget / 2
              + p3.abs_error_budget / 3 + 8 * EPS * abs(rhs))
    return IdentityCheck("R3 decomposition", x, float(r.value), rhs, 2 * budget)


def identity_r4(x: int, prec: int | None = None, store: PrimeStore | None = None) -> IdentityCheck:
    """24 R_4 = S_4 + 6 sum 1/(p^2qr) + 3 sum 1/(p^2q^2) + 8 sum 1/(p^3q) + 6 sum 1/p^4."""
    r = rk_sieve(4, x, prec)
    pieces = [
        (1, sk_recursive(4, x, prec, store, enforce_ceiling=False)),
        (6, p2qr_sum(x, prec, store)),
        (3, p2q2_sum(x, prec)),
        (8, pq_a_sum(3, x, prec, store)),
        (6, prime_power_sum(4, x, prec)),
    ]
    rhs = math.fsum(c * float(p.value) for c, p in pieces) / 24
    budget = r.abs_error_budget + sum(c * p.abs_error_budget for c, p in pieces) / 24 + 16 * EPS * abs(rhs)
    return IdentityCheck("R4 five-sum decomposition", x, float(r.value), rhs, 2 * budget)


def identity_s2(x: int, prec: int | None = None, store: PrimeStore | None = None) -> IdentityCheck:
    """S_2 = 2 R_2 - sum_{p^2 <= x} 1/p^2 (ordered pairs split into p < q, p = q)."""
    s = sk_recursive(2, x, prec, store, enforce_ceiling=False)
    r = rk_sieve(2, x, prec)
    p2 = prime_power_sum(2, x, prec)
    rhs = 2 * float(r.value) - float(p2.value)
    budget = s.abs_error_budget + 2 * r.abs_error_budget + p2.abs_error_budget + 4 * EPS * abs(rhs)
    return IdentityCheck("S2 symmetry", x, float(s.value), rhs, 2 * budget)


def identity_suite(xs=(10**4, 10**5, 10**6), prec: int | None = None) -> list:
    out = []
    for x in xs:
        out.append(identity_s2(x, prec))
        out.append(identity_r3(x, prec))
        out.append(identity_r4(x, prec))
    return out


# ---------------------------------------------------------------------------
# alpha_j at finite x


def alpha_limit_estimate(j: int, x: int, prec: int | None = None,
                         store: PrimeStore | None = None) -> OracleResult:
    """(1/j) (log^j x / j - sum_{p <= x} log^j p / p)."""
    prec = check_prec(prec)
    t0 = time.perf_counter()
    if j < 1:
        raise ValueError("j must be >= 1")
    x = int(x)
    st = _store(x, store, prec)
    with precision(prec + 16):
        L = mpmath.log(x)
        s = st.logpow_prefix(j, x)
        val = (L**j / j - s) / j
    budget = float(abs(s)) * (j + 4) * EPS / j
    return _result("alpha_limit", x, j, val, budget, t0, prec)


def alpha1_rearranged(x: int, prec: int | None = None, store: PrimeStore | None = None) -> mpf:
    """log x - sum_{p<=x} log p / p, computed as sum_{p<=x} log p (1/(p-1) - 1/p) tail form check:
    sum log p/p = sum log p/(p - 1) - sum log p/(p(p - 1)) evaluated separately."""
    prec = check_prec(prec)
    x = int(x)
    st = _store(x, store, prec)
    ps = st.primes_upto(x).astype(np.float64)
    lp = np.log(ps)
    a = math.fsum((lp / (ps - 1)).tolist())
    b = math.fsum((lp / (ps * (ps - 1))).tolist())
    with precision(prec):
        return mpmath.log(x) - (mpf(a) - mpf(b))


def d_jk_quadrature(j: int, k: int, plimit: int = 10**7, prec: int | None = None,
                    store: PrimeStore | None = None) -> OracleResult:
    """int_2^inf eps_k(t) log^(j-1) t / t dt with eps_k(t) = sum_{p>t} p^-k.

    eps_k is constant between consecutive primes, so up to the last prime
    below ``plimit`` the integral is a finite sum.  Past it eps_k(t) is
    replaced by its prime-number-theorem value int_t^inf du/(u^k log u)
    = E_1((k-1) log t); the model error is far below the tail itself.
    P(k) comes from the analytic prime zeta route.
    """
    from .zetaprime import prime_zeta

    prec = check_prec(prec)
    t0 = time.perf_counter()
    if j < 1 or k < 2:
        raise ValueError("need j >= 1 and k >= 2")
    st = _store(plimit, store, prec)
    ps = st.primes_upto(plimit).astype(np.float64)
    Pk = float(prime_zeta(k, prec))
    # eps on [p_i, p_{i+1}) is P(k) minus the partial sum through p_i; the
    # running sum is kept in extended precision so its drift stays tiny
    ext = np.longdouble
    partial = np.cumsum(ps.astype(ext) ** (-k))
    eps = (ext(Pk) - partial).astype(np.float64)
    lg = np.log(ps)
    F = lg**j / j  # antiderivative of log^(j-1) t / t
    body = math.fsum((eps[:-1] * np.diff(F)).tolist())
    unit = float(np.finfo(ext).eps)
    drift = len(ps) * unit * Pk + 2 * EPS * Pk  # per-interval error on eps
    X = float(ps[-1])
    with precision(64):
        L = mpmath.log(X)
        tail = mpmath.quad(lambda v: mpmath.e1((k - 1) * v) * v ** (j - 1), [L, L + 40, mpmath.inf])
    value = body + float(tail)
    budget = 1e-3 * float(tail) + drift * float(F[-1]) + 4 * EPS * abs(body)
    return _result("d_jk", plimit, j, value, budget, t0, prec)
