"""Derivatives of 1/Gamma at the non-positive integers 1 - M.

1/Gamma(1+w) = exp(gamma w - sum_{j>=2} zeta(j) (-w)^j / j), and the
functional equation gives 1/Gamma(w + 1 - M) = w (w-1) ... (w-M+1) / Gamma(1+w).
Multiplying the series by that polynomial yields the full Taylor jet at 1 - M
without any numerical differentiation.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import mpmath
from mpmath import mpf

from .numkernel import (
    DEFAULT_SERIES_ORDER,
    PowerSeries,
    SeriesError,
    check_prec,
    poly_from_roots,
    precision,
    series_exp,
)
from .zetaprime import zeta_int


@dataclass(frozen=True)
class InvGammaJet:
    """derivs[n] = (1/Gamma)^(n)(1 - M)."""

    M: int
    order: int
    derivs: tuple
    prec: int

    def taylor(self) -> PowerSeries:
        out, fact = [], mpf(1)
        with precision(self.prec + 16):
            for n, d in enumerate(self.derivs):
                if n:
                    fact *= n
                out.append(d / fact)
        return PowerSeries(tuple(out), f"1/Gamma@{1 - self.M}")


@functools.lru_cache(maxsize=64)
def inv_gamma_series_at_one(order: int, prec: int) -> PowerSeries:
    """Taylor series of 1/Gamma(1 + w)."""
    wp = prec + 24
    with precision(wp):
        a = [mpf(0), +mpmath.euler]
        for j in range(2, order + 1):
            a.append(-zeta_int(j, wp) * (-1) ** j / j)
        return series_exp(PowerSeries(tuple(a[: order + 1]), "1/Gamma(1+w)"))


@functools.lru_cache(maxsize=256)
def _jet(M: int, order: int, prec: int) -> InvGammaJet:
    wp = prec + 24
    base = inv_gamma_series_at_one(order, prec)
    with precision(wp):
        # w (w - 1) ... (w - M + 1); M = 0 means no shift at all
        poly = poly_from_roots(list(range(M)), order) if M else PowerSeries.constant(1, order)
        ser = poly * base
        derivs, fact = [], mpf(1)
        for n in range(order + 1):
            if n:
                fact *= n
            derivs.append(ser[n] * fact)
    with precision(prec):
        return InvGammaJet(M, order, tuple(+d for d in derivs), prec)


def inv_gamma_jet(M: int, order: int, prec: int | None = None) -> InvGammaJet:
    """(1/Gamma)^(n)(1 - M) for n = 0..order.

    M = 0 (the point z = 1) is accepted too; the expansion generator needs it
    for the terms without any power of 1/log x.
    """
    prec = check_prec(prec)
    if M < 0:
        raise ValueError("M must be >= 0")
    if order < 0 or order + M > DEFAULT_SERIES_ORDER:
        raise SeriesError(f"order {order} too large for M = {M} (series order {DEFAULT_SERIES_ORDER})")
    return _jet(int(M), int(order), prec)


def harmonic(n: int) -> mpf:
    return mpmath.fsum(mpf(1) / j for j in range(1, n + 1))


def gamma_prime(M: int, prec: int | None = None) -> mpf:
    """Gamma'(M) = (M-1)! (H_{M-1} - gamma)."""
    prec = check_prec(prec)
    if M < 1:
        raise ValueError("M must be >= 1")
    with precision(prec + 16):
        val = mpmath.factorial(M - 1) * (harmonic(M - 1) - mpmath.euler)
    with precision(prec):
        return +val


def gamma_double_prime(M: int, prec: int | None = None) -> mpf:
    """Gamma''(M) = (M-1)! ((H_{M-1} - gamma)^2 + zeta(2) - H^{(2)}_{M-1})."""
    prec = check_prec(prec)
    if M < 1:
        raise ValueError("M must be >= 1")
    with precision(prec + 16):
        h1 = harmonic(M - 1) - mpmath.euler
        h2 = mpmath.fsum(mpf(1) / j**2 for j in range(1, M))
        val = mpmath.factorial(M - 1) * (h1**2 + zeta_int(2, prec + 16) - h2)
    with precision(prec):
        return +val


def inv_gamma_derivative_closed(n: int, M: int, prec: int | None = None) -> mpf:
    """Closed forms for (1/Gamma)^(n)(1 - M), n <= 3, from the reflection formula."""
    prec = check_prec(prec)
    if M < 1:
        raise ValueError("M must be >= 1")
    with precision(prec + 16):
        sign = (-1) ** (M - 1)
        if n == 0:
            val = mpf(0)
        elif n == 1:
            val = sign * mpmath.factorial(M - 1)
        elif n == 2:
            val = -2 * sign * gamma_prime(M, prec + 16)
        elif n == 3:
            val = sign * (3 * gamma_double_prime(M, prec + 16) - mpmath.pi**2 * mpmath.factorial(M - 1))
        else:
            raise ValueError("closed forms are available for n <= 3")
    with precision(prec):
        return +val
