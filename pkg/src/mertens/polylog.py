"""Negative-order polylogarithms and the integral I(k, x).

Li_{-k}(z) = z A_k(z) / (1 - z)^(k+1) with A_k the Eulerian polynomial, so the
value is a rational function of z evaluated exactly up to rounding.
I(k, x) = int_1^inf t^k x^-t dt has the closed form
(1/x) sum_{j=1}^{k+1} k!/(k+1-j)! / log(x)^j.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import mpmath
from mpmath import mpf

from .numkernel import check_prec, precision


class DivergenceError(ValueError):
    pass


@functools.lru_cache(maxsize=512)
def eulerian_row(k: int) -> tuple:
    """A(k, i) for i = 0..k-1 (A(0, 0) = 1)."""
    row = [1]
    for n in range(1, k + 1):
        new = [0] * n
        for i in range(n):
            left = row[i - 1] if i >= 1 else 0
            mid = row[i] if i < len(row) else 0
            new[i] = (i + 1) * mid + (n - i) * left
        row = new
    return tuple(row)


def li_neg(k: int, z, prec: int | None = None) -> mpf:
    """Li_{-k}(z) = sum_n n^k z^n for 0 < z < 1."""
    prec = check_prec(prec)
    if k < 0:
        raise ValueError("k must be >= 0")
    with precision(prec + 16):
        z = mpf(z)
        if z >= 1:
            raise DivergenceError(f"Li_(-{k})(z) diverges for z >= 1 (z = {z})")
        if z <= 0:
            raise ValueError("li_neg is implemented for 0 < z < 1")
        poly = mpf(0)
        for c in reversed(eulerian_row(k)):
            poly = poly * z + c
        val = z * poly / (1 - z) ** (k + 1)
    with precision(prec):
        return +val


def li_neg_direct(k: int, z, terms: int, prec: int | None = None) -> mpf:
    """Partial sum of the defining series (oracle)."""
    prec = check_prec(prec)
    with precision(prec + 16):
        z = mpf(z)
        val = mpmath.fsum(mpf(n) ** k * z**n for n in range(1, terms + 1))
    with precision(prec):
        return +val


def i_integral(k: int, x, prec: int | None = None) -> mpf:
    prec = check_prec(prec)
    if k < 0:
        raise ValueError("k must be >= 0")
    with precision(prec + 16):
        x = mpf(x)
        if x <= 1:
            raise ValueError("I(k, x) needs x > 1")
        lx = mpmath.log(x)
        # k!/(k+1-j)! / log^j x, built from j = 1 upward
        term = 1 / lx
        total = term
        for j in range(2, k + 2):
            term = term * (k + 2 - j) / lx
            total += term
        val = total / x
    with precision(prec):
        return +val


def i_integral_bounds(k: int, x, prec: int | None = None) -> tuple[mpf, mpf]:
    """Lower and upper bounds for I(k, x) from the sandwich inequality."""
    prec = check_prec(prec)
    with precision(prec + 16):
        x = mpf(x)
        lx = mpmath.log(x)
        lead = mpmath.factorial(k) / lx ** (k + 1)
        frac = lx ** (k + 1) / mpmath.factorial(k + 1)
        return lead * (1 - frac), lead * (1 - frac / x)


@dataclass(frozen=True)
class NegPolyEval:
    k: int
    x: mpf
    li_value: mpf
    i_value: mpf

    @property
    def ratio(self) -> mpf:
        return self.li_value / self.i_value


def neg_poly_eval(k: int, x, prec: int | None = None) -> NegPolyEval:
    prec = check_prec(prec)
    with precision(prec + 16):
        x = mpf(x)
        return NegPolyEval(k, x, li_neg(k, 1 / x, prec), i_integral(k, x, prec))


@dataclass(frozen=True)
class BoundCheck:
    name: str
    k: int
    x: str
    passed: bool
    lhs: float
    rhs: float


@dataclass
class AppendixReport:
    checks: list
    polylog_constant: mpf

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> dict:
        names = sorted({c.name for c in self.checks})
        return {
            n: {
                "checked": sum(1 for c in self.checks if c.name == n),
                "failed": sum(1 for c in self.checks if c.name == n and not c.passed),
            }
            for n in names
        }


DEFAULT_X_GRID = ("1.5", "2", "e", "10", "e^16")
ACCEPTANCE_X_GRID = ("1.5", "2", "e", "10")


def _parse_x(label: str) -> mpf:
    if label == "e":
        return +mpmath.e
    if label.startswith("e^"):
        return mpmath.exp(mpf(label[2:]))
    return mpf(label)


def _sandwich_check(k: int, label: str, x: mpf, prec: int) -> BoundCheck:
    # the two bounds differ from k!/log^(k+1) x only in the bit position of
    # log^(k+1) x/(k+1)!, so the comparison runs with that many extra bits
    with precision(64):
        lx = mpmath.log(x)
        gap = -mpmath.log(lx ** (k + 1) / mpmath.factorial(k + 1), 2)
    wp = prec + max(0, int(gap)) + 64
    with precision(wp):
        val = i_integral(k, x, wp)
        lo, hi = i_integral_bounds(k, x, wp)
        lead = mpmath.factorial(k) / mpmath.log(x) ** (k + 1)
        ok = lo < val < hi
        return BoundCheck("sandwich", k, label, bool(ok), float((val - lo) / lead),
                          float((hi - val) / lead))


def appendix_bound_suite(x_grid=DEFAULT_X_GRID, k_max: int = 200, prec: int | None = None,
                         m_max: str = "e^16") -> AppendixReport:
    """Ratio bound, sandwich and Stirling checks over the grid.

    The polylog constant reported is the grid maximum of
    Li_{1-j}(1/x) log(x)^j / (j-1)! for 2 <= j <= k_max + 1 and 1 < x <= m_max.
    """
    prec = check_prec(prec)
    checks = []
    with precision(prec + 16):
        for label in x_grid:
            x = _parse_x(label)
            for k in range(1, k_max + 1):
                ev = neg_poly_eval(k, x, prec)
                dev = abs(ev.ratio - 1)
                bound = x / mpmath.sqrt(2 * mpmath.pi * k)
                checks.append(BoundCheck("ratio", k, label, bool(dev < bound), float(dev), float(bound)))
                checks.append(_sandwich_check(k, label, x, prec))
        for k in range(1, k_max + 1):
            s = mpmath.factorial(k) / ((k / mpmath.e) ** k * mpmath.sqrt(2 * mpmath.pi * k))
            upper = mpmath.exp(mpf(1) / (12 * k))
            checks.append(BoundCheck("stirling", k, "-", bool(1 <= s <= upper), float(s), float(upper)))
        top = _parse_x(m_max)
        grid = [mpf(1) + (top - 1) * mpf(i) / 64 for i in range(1, 65)]
        grid += [mpf(1) + mpf(2) ** -e for e in range(1, 12)]
        worst = mpf(0)
        for x in grid:
            lx = mpmath.log(x)
            for j in range(2, k_max + 2):
                v = li_neg(j - 1, 1 / x, prec) * lx**j / mpmath.factorial(j - 1)
                worst = max(worst, v)
    return AppendixReport(checks, worst)


def stirling_ratio(k: int) -> float:
    return math.exp(math.lgamma(k + 1) - (k * math.log(k) - k + 0.5 * math.log(2 * math.pi * k)))
