"""Higher Mertens constants alpha_j, prime-zeta derivatives alpha_{j,a}, d_{j,k}
and the Mertens constant beta.

The main route for alpha_j is

    alpha_j = (1/j) (sum_{k>=2} k^(j-1) alpha_{j,k} + (-1)^j (j-1)! eta_{j-1})

with alpha_{j,k} taken from the Taylor coefficients of P(s) at s = k (see
zetaprime).  A direct sieve sum cannot reach alpha_{j,2} for j near 26: the
summand log(p)^j/p^2 peaks near p = e^(j/2).

Truncation of the k-sum: alpha_{j,k+1} <= alpha_{j,k}/2 termwise, so past the
peak of k^(j-1) 2^-k the remaining terms shrink at least geometrically with
ratio q = ((k+1)/k)^(j-1)/2 and the tail is at most term * q/(1-q).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from mpmath import mpf

from .numkernel import check_prec, precision
from .zetaprime import eta_coeffs, prime_zeta, prime_zeta_column

ALPHA_ORDER = 40
MAX_J = 40
CHEBYSHEV_C = mpf("1.3")  # pi(t) <= 1.3 t / log t for t >= 17
CHEBYSHEV_START = 17


class TailBoundError(ValueError):
    pass


@dataclass(frozen=True)
class Estimate:
    """A value together with an absolute error budget."""

    value: mpf
    budget: mpf
    note: str = ""

    def __float__(self) -> float:
        return float(self.value)


def _column(k: int, order: int, prec: int):
    return prime_zeta_column(mpf(k), max(order, ALPHA_ORDER), prec)


def euler_gamma(prec: int | None = None) -> mpf:
    prec = check_prec(prec)
    with precision(prec):
        return +mpmath.euler


# ---------------------------------------------------------------------------
# alpha_{j,a}


def alpha_ja_estimate(j: int, a, plimit: int | None = None, prec: int | None = None,
                      tolerance=None, store=None) -> Estimate:
    """alpha_{j,a} = sum_p log(p)^j / p^a.

    plimit None: analytic route through the prime zeta Taylor series.
    plimit given: sieve sum over p <= plimit plus a Chebyshev tail bound,
        2 * 1.3 a Gamma(j, (a-1) log X) / (a-1)^j
    (integration by parts against pi(t) <= 1.3 t/log t, doubled).
    """
    prec = check_prec(prec)
    if j < 0:
        raise ValueError("j must be >= 0")
    a = mpf(a)
    if a <= 1:
        raise ValueError("alpha_{j,a} needs a > 1")
    if plimit is None:
        col = _column(a, j, prec)
        return Estimate(col.values[j], col.budget[j], "prime-zeta series")
    from .primes import get_store

    X = int(plimit)
    if X < CHEBYSHEV_START:
        raise TailBoundError(f"plimit must be >= {CHEBYSHEV_START} for the Chebyshev tail bound")
    if X < math.exp(j / float(a)):
        raise TailBoundError(
            f"summand still increasing at plimit={X}; need plimit > e^(j/a) = {math.exp(j / float(a)):.3g}"
        )
    st = store if store is not None else get_store(X, prec)
    p = st.primes_upto(X).astype(np.float64)
    terms = np.exp(j * np.log(np.log(p)) - float(a) * np.log(p)) if j else p ** (-float(a))
    with precision(prec):
        head = mpf(math.fsum(terms.tolist()))
        rounding = head * mpf(2) ** -50
        tail = 2 * CHEBYSHEV_C * a * mpmath.gammainc(j, (a - 1) * mpmath.log(X)) / (a - 1) ** j \
            if j else 2 * CHEBYSHEV_C * a * mpmath.gammainc(0, (a - 1) * mpmath.log(X))
        budget = tail + rounding
        if tolerance is not None and budget > tolerance:
            raise TailBoundError(
                f"tail bound {mpmath.nstr(budget, 3)} exceeds tolerance {tolerance}; use a larger plimit"
            )
        return Estimate(head, budget, f"sieve p<={X}")


def alpha_ja(j: int, a, plimit: int | None = None, prec: int | None = None) -> mpf:
    return alpha_ja_estimate(j, a, plimit, prec).value


def prime_zeta_value(a, prec: int | None = None) -> mpf:
    return prime_zeta(a, check_prec(prec))


def d_jk(j: int, k: int, prec: int | None = None) -> mpf:
    """d_{j,k} = (alpha_{j,k} - P(k) log(2)^j) / j."""
    prec = check_prec(prec)
    if j < 1 or k < 2:
        raise ValueError("d_{j,k} needs j >= 1 and k >= 2")
    col = _column(k, j, prec)
    with precision(prec + 16):
        val = (col.values[j] - col.values[0] * mpmath.log(2) ** j) / j
    with precision(prec):
        return +val


# ---------------------------------------------------------------------------
# alpha_j


@dataclass(frozen=True)
class AlphaResult:
    j: int
    value: mpf
    budget: mpf
    k_max: int
    k_sum: mpf
    eta_term: mpf


@functools.lru_cache(maxsize=256)
def _alpha_cached(j: int, prec: int) -> AlphaResult:
    eta = eta_coeffs(max(ALPHA_ORDER, j), prec)
    wp = prec + 16
    with precision(wp):
        total = mpf(0)
        budget = mpf(0)
        peak = (j - 1) / math.log(2)
        k = 2
        while True:
            col = _column(k, j, prec)
            kp = mpf(k) ** (j - 1)
            term = kp * col.values[j]
            total += term
            budget += kp * col.budget[j]
            if k > peak + 1:
                q = (mpf(k + 1) / k) ** (j - 1) / 2
                tail = term * q / (1 - q)
                if tail < total * mpf(2) ** (-prec - 16):
                    budget += tail
                    break
            k += 1
        eterm = (-1) ** j * mpmath.factorial(j - 1) * eta[j - 1]
        value = (total + eterm) / j
        budget = (budget + abs(eterm) * mpf(2) ** (-prec + 8)) / j + abs(value) * mpf(2) ** (-prec)
    with precision(prec):
        return AlphaResult(j, +value, +budget, k, +total, +eterm)


def alpha_result(j: int, prec: int | None = None) -> AlphaResult:
    prec = check_prec(prec)
    if not 1 <= j <= MAX_J:
        raise ValueError(f"alpha(j) supports 1 <= j <= {MAX_J}")
    return _alpha_cached(int(j), prec)


def alpha(j: int, prec: int | None = None) -> mpf:
    return alpha_result(j, prec).value


def alpha_sum_pp1(j: int, prec: int | None = None) -> Estimate:
    """sum_p log(p)^j / (p (p-1)) = sum_{k>=2} alpha_{j,k}."""
    prec = check_prec(prec)
    with precision(prec + 16):
        total, budget, k = mpf(0), mpf(0), 2
        while True:
            col = _column(k, j, prec)
            total += col.values[j]
            budget += col.budget[j]
            if k > j / math.log(2) + 1 and col.values[j] < total * mpf(2) ** (-prec - 16):
                budget += col.values[j]
                break
            k += 1
    with precision(prec):
        return Estimate(+total, +budget, f"k<={k}")


def ratio_normalizer(j: int) -> mpf:
    """j! 2^j / (2 j^2)."""
    return mpmath.factorial(j) * mpf(2) ** j / (2 * j * j)


def ratio_table(j_max: int, prec: int | None = None) -> list:
    """[(j, alpha_j / (j! 2^j / (2 j^2)))] for j = 1..j_max."""
    prec = check_prec(prec)
    if j_max > MAX_J:
        raise ValueError(f"j_max <= {MAX_J}")
    rows = []
    for j in range(1, j_max + 1):
        res = alpha_result(j, prec)
        with precision(prec):
            rows.append((j, res.value / ratio_normalizer(j)))
    return rows


def rh_refinement_diagnostic(j_range, prec: int | None = None) -> list:
    """(j, ratio_j, (ratio_j - 1) (4/3)^j); report only."""
    prec = check_prec(prec)
    out = []
    for j in j_range:
        with precision(prec):
            r = alpha(j, prec) / ratio_normalizer(j)
            out.append((j, r, (r - 1) * (mpf(4) / 3) ** j))
    return out


# ---------------------------------------------------------------------------
# alpha_j from the convergent sum over primes


def alpha_via_convergent_formula(j: int, plimit: int = 10**7, prec: int | None = None,
                                 store=None) -> Estimate:
    """alpha_j from the representation with the E-bar integral.

    (1/j) (gamma log^(j-1) 2 + sum_p log^j p/(p(p-1)) - ((j-1)/j) log^j 2
           + (j-1) int_2^inf Ebar(t) log^(j-2) t dt/t)

    Ebar(t) = sum_{p<=t} log p/(p-1) - log t + gamma is a step function plus
    -log t, so the integral over [2, X] is summed exactly interval by interval.
    Past X the dominant, non-oscillating part of Ebar is the prime-power
    excess sum_{p<=t} sum_{k: p^k>t} log p/p^k, which by the prime number
    theorem is close to sum_{k>=2} (t^(-(k-1)/k) - 1/t)/(k-1); that model is
    integrated in closed form and added.  The prime sum uses p <= X plus the
    PNT main term Gamma(j, log X) for the remainder.  Budgets for both tail
    models are engineering estimates (5% of the correction), not bounds.
    """
    from .primes import get_store

    prec = check_prec(prec)
    if j < 1:
        raise ValueError("j must be >= 1")
    X = int(plimit)
    st = store if store is not None else get_store(X, prec)
    p = st.primes_upto(X).astype(np.float64)
    lp = np.log(p)
    g = float(mpmath.euler)
    l2 = math.log(2.0)
    psum = math.fsum((lp**j / (p * (p - 1))).tolist())
    psum_tail = float(mpmath.gammainc(j, math.log(X)))
    integral = 0.0
    if j >= 2:
        A = np.cumsum(lp / (p - 1))  # A_i on [p_i, p_{i+1})
        u0 = lp
        u1 = np.append(lp[1:], math.log(X))
        # int (C - u) u^(j-2) du with C = A_i + gamma
        C = A + g
        pieces = C * (u1 ** (j - 1) - u0 ** (j - 1)) / (j - 1) - (u1**j - u0**j) / j
        integral = math.fsum(pieces.tolist())
    itail = _prime_power_tail(j, X) if j >= 2 else 0.0
    with precision(prec):
        val = (mpf(g) * mpf(l2) ** (j - 1) + mpf(psum) + mpf(psum_tail)
               - mpf(j - 1) / j * mpf(l2) ** j + (j - 1) * mpf(integral + itail)) / j
        budget = (mpf(psum_tail) + (j - 1) * mpf(abs(itail))) / (20 * j) + mpf(2) ** -40
    return Estimate(val, budget, f"p<={X}; Ebar tail past X modelled")


def _prime_power_tail(j: int, X: int, kmax: int = 8) -> float:
    """int_X^inf sum_{2<=k<=kmax} (t^(-(k-1)/k) - 1/t)/(k-1) * log^(j-2) t dt/t."""
    m = j - 2
    L = math.log(X)
    tot = 0.0
    for k in range(2, kmax + 1):
        e = (k - 1) / k
        # int_L^inf e^(-e u) u^m du = Gamma(m+1, e L)/e^(m+1)
        tot += (float(mpmath.gammainc(m + 1, e * L)) / e ** (m + 1)
                - float(mpmath.gammainc(m + 1, L))) / (k - 1)
    return tot


# ---------------------------------------------------------------------------
# beta


@functools.lru_cache(maxsize=8)
def _beta_cached(prec: int) -> Estimate:
    wp = prec + 16
    with precision(wp):
        total = mpf(0)
        m = 2
        while True:
            term = prime_zeta(m, wp) / m
            total += term
            if term < mpf(2) ** (-wp - 2):
                # P(m+1) <= P(m)/2, so the remaining terms sum to less than term
                tail = term
                break
            m += 1
        val = mpmath.euler - total
    with precision(prec):
        return Estimate(+val, tail + abs(val) * mpf(2) ** (-prec), f"m<={m}")


def beta_estimate(prec: int | None = None) -> Estimate:
    """beta = gamma + sum_p (1/p + log(1 - 1/p)) = gamma - sum_{m>=2} P(m)/m."""
    return _beta_cached(check_prec(prec))


def beta(prec: int | None = None) -> mpf:
    return beta_estimate(prec).value


def beta_direct(plimit: int, prec: int | None = None, store=None) -> Estimate:
    """gamma + sum_{p<=X} (1/p + log(1-1/p)) with the tail -sum_{p>X} 1/(2p^2) bounded."""
    from .primes import get_store

    prec = check_prec(prec)
    st = store if store is not None else get_store(int(plimit), prec)
    p = st.primes_upto(int(plimit)).astype(np.float64)
    terms = 1.0 / p + np.log1p(-1.0 / p)
    with precision(prec):
        head = mpf(math.fsum(terms.tolist()))
        tail = mpf(1) / (plimit * math.log(plimit))  # sum_{p>X} 1/p^2 < 1/(X log X)
        return Estimate(mpmath.euler + head, tail, f"p<={plimit}")


# ---------------------------------------------------------------------------
# table


@dataclass
class ConstantsTable:
    """Memoized constants at one precision."""

    prec: int = 192
    jmax: int = 26
    amax: int = 4
    beta: mpf = field(default=None)
    gamma: mpf = field(default=None)
    alpha: dict = field(default_factory=dict)
    alpha_ja: dict = field(default_factory=dict)
    pzeta: dict = field(default_factory=dict)
    eta: object = None
    error_budget: dict = field(default_factory=dict)

    @classmethod
    def build(cls, jmax: int = 26, amax: int = 4, prec: int | None = None) -> "ConstantsTable":
        prec = check_prec(prec)
        t = cls(prec=prec, jmax=jmax, amax=amax)
        b = beta_estimate(prec)
        t.beta = b.value
        t.error_budget["beta"] = b.budget
        t.gamma = euler_gamma(prec)
        t.error_budget["gamma"] = mpf(2) ** (-prec)
        t.eta = eta_coeffs(max(ALPHA_ORDER, jmax), prec)
        for j in range(1, jmax + 1):
            r = alpha_result(j, prec)
            t.alpha[j] = r.value
            t.error_budget[("alpha", j)] = r.budget
        for a in range(2, amax + 1):
            col = _column(a, jmax, prec)
            t.pzeta[a] = col.values[0]
            t.error_budget[("P", a)] = col.budget[0]
            for j in range(0, jmax + 1):
                t.alpha_ja[(j, a)] = col.values[j]
                t.error_budget[("alpha_ja", j, a)] = col.budget[j]
        return t

    def a(self, j: int) -> mpf:
        if j not in self.alpha:
            r = alpha_result(j, self.prec)
            self.alpha[j] = r.value
            self.error_budget[("alpha", j)] = r.budget
        return self.alpha[j]

    def aja(self, j: int, a: int) -> mpf:
        if a == 1:
            return -j * self.a(j)
        if (j, a) not in self.alpha_ja:
            col = _column(a, j, self.prec)
            for i, v in enumerate(col.values):
                self.alpha_ja[(i, a)] = v
                self.error_budget[("alpha_ja", i, a)] = col.budget[i]
        return self.alpha_ja[(j, a)]

    def P(self, a: int) -> mpf:
        if a not in self.pzeta:
            self.pzeta[a] = self.aja(0, a)
            self.error_budget[("P", a)] = self.error_budget[("alpha_ja", 0, a)]
        return self.pzeta[a]


@functools.lru_cache(maxsize=4)
def default_table(prec: int = 192) -> ConstantsTable:
    return ConstantsTable(prec=prec, beta=beta(prec), gamma=euler_gamma(prec), eta=eta_coeffs(ALPHA_ORDER, prec))
