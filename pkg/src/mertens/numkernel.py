"""Precision-parameterized reals and truncated power series.

All numeric values in the package are :class:`mpmath.mpf` instances
(aliased here as ``HPReal``).  Basic mpf arithmetic is correctly rounded
(round-to-nearest) at the working precision of the active mpmath context;
callers select that precision with :func:`precision`.

Power series are immutable tuples of coefficients; every operation
truncates at the order of its inputs and never reads past it.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

import mpmath
from mpmath import mp, mpf

HPReal = mpf

DEFAULT_PREC = 192
MIN_PREC = 64
GUARD_BITS = 8
DEFAULT_SERIES_ORDER = 64

Scalar = Union[int, float, mpf]


class PrecisionError(ValueError):
    pass


class SeriesError(ValueError):
    pass


def check_prec(prec: int | None) -> int:
    if prec is None:
        return DEFAULT_PREC
    prec = int(prec)
    if prec < MIN_PREC:
        raise PrecisionError(f"prec_bits must be >= {MIN_PREC}, got {prec}")
    return prec


@contextlib.contextmanager
def precision(bits: int) -> Iterator[int]:
    """Run a block at ``bits`` of binary working precision."""
    with mpmath.workprec(int(bits)):
        yield int(bits)


def hp(value: Scalar | str, prec: int | None = None) -> mpf:
    """Convert ``value`` to an HPReal rounded to ``prec`` bits."""
    with precision(check_prec(prec)):
        return +mpf(value)


def ulp_bound(prec: int, guard: int = GUARD_BITS) -> mpf:
    """Relative tolerance 2^(guard - prec) used throughout the tests."""
    return mpf(2) ** (guard - prec)


@dataclass(frozen=True)
class PowerSeries:
    """Truncated Taylor series sum_{i<=order} coeffs[i] * w^i."""

    coeffs: tuple
    center_label: str = ""

    def __post_init__(self) -> None:
        if len(self.coeffs) == 0:
            raise SeriesError("a series needs at least one coefficient")
        object.__setattr__(
            self, "coeffs", tuple(c if isinstance(c, mpf) else mpf(c) for c in self.coeffs)
        )

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c: Scalar, order: int, center_label: str = "") -> "PowerSeries":
        return cls((c,) + (0,) * order, center_label)

    @classmethod
    def variable(cls, order: int, center_label: str = "") -> "PowerSeries":
        if order < 1:
            return cls((0,), center_label)
        return cls((0, 1) + (0,) * (order - 1), center_label)

    def __getitem__(self, i: int) -> mpf:
        return self.coeffs[i]

    def __iter__(self) -> Iterator[mpf]:
        return iter(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __neg__(self) -> "PowerSeries":
        return PowerSeries(tuple(-c for c in self.coeffs), self.center_label)

    def __add__(self, other) -> "PowerSeries":
        if isinstance(other, PowerSeries):
            _same_order(self, other)
            return PowerSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                               self.center_label)
        return PowerSeries((self.coeffs[0] + other,) + self.coeffs[1:], self.center_label)

    __radd__ = __add__

    def __sub__(self, other) -> "PowerSeries":
        return self + (-other)

    def __rsub__(self, other) -> "PowerSeries":
        return (-self) + other

    def __mul__(self, other) -> "PowerSeries":
        if isinstance(other, PowerSeries):
            return series_mul(self, other)
        return PowerSeries(tuple(c * other for c in self.coeffs), self.center_label)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PowerSeries":
        if isinstance(other, PowerSeries):
            return series_div(self, other)
        return PowerSeries(tuple(c / other for c in self.coeffs), self.center_label)

    def __call__(self, w: Scalar) -> mpf:
        acc = mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * w + c
        return acc

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise SeriesError(f"cannot extend order {self.order} to {order}")
        return PowerSeries(self.coeffs[: order + 1], self.center_label)

    def scale_variable(self, c: Scalar) -> "PowerSeries":
        """Series of f(c*w) from the series of f(w)."""
        out, cp = [], mpf(1)
        for a in self.coeffs:
            out.append(a * cp)
            cp *= c
        return PowerSeries(tuple(out), self.center_label)

    def max_abs(self) -> mpf:
        return max(abs(c) for c in self.coeffs)


def _same_order(a: PowerSeries, b: PowerSeries) -> None:
    if a.order != b.order:
        raise SeriesError(f"order mismatch: {a.order} vs {b.order}")


def series_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    _same_order(a, b)
    ac, bc = a.coeffs, b.coeffs
    out = [mpmath.fdot(ac[: n + 1], bc[n::-1]) for n in range(len(ac))]
    return PowerSeries(tuple(out), a.center_label)


def series_exp(a: PowerSeries) -> PowerSeries:
    """exp(a) via n*b_n = sum_{k=1..n} k*a_k*b_{n-k}, from (exp a)' = a' exp a."""
    if a.coeffs[0] != 0:
        raise SeriesError("series_exp needs a zero constant term")
    ka = [k * c for k, c in enumerate(a.coeffs)]
    b = [mpf(1)]
    for n in range(1, a.order + 1):
        b.append(mpmath.fdot(ka[1 : n + 1], b[n - 1 :: -1]) / n)
    return PowerSeries(tuple(b), a.center_label)


def series_div(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    _same_order(a, b)
    b0 = b.coeffs[0]
    if b0 == 0:
        raise SeriesError("series_div by a series with zero constant term")
    bc = b.coeffs
    q: list = []
    for n in range(a.order + 1):
        s = a.coeffs[n] - mpmath.fdot(bc[1 : n + 1], q[::-1]) if n else a.coeffs[0]
        q.append(s / b0)
    return PowerSeries(tuple(q), a.center_label)


def series_deriv(a: PowerSeries) -> PowerSeries:
    if a.order == 0:
        return PowerSeries((0,), a.center_label)
    return PowerSeries(tuple(k * a.coeffs[k] for k in range(1, a.order + 1)), a.center_label)


def series_integral(a: PowerSeries, constant: Scalar = 0) -> PowerSeries:
    """Antiderivative, truncated back to the order of ``a``."""
    out = [mpf(constant)] + [a.coeffs[k] / (k + 1) for k in range(a.order)]
    return PowerSeries(tuple(out), a.center_label)


def series_log(a: PowerSeries) -> PowerSeries:
    """log(a) for a positive constant term."""
    a0 = a.coeffs[0]
    if a0 <= 0:
        raise SeriesError("series_log needs a positive constant term")
    if a.order == 0:
        return PowerSeries((mpmath.log(a0),), a.center_label)
    ratio = series_div(series_deriv(a), a.truncate(a.order - 1))
    return series_integral(
        PowerSeries(ratio.coeffs + (mpf(0),), a.center_label), mpmath.log(a0)
    )


def exp_linear(rate: Scalar, order: int, center_label: str = "") -> PowerSeries:
    """Series of exp(rate * w)."""
    out, term = [], mpf(1)
    for i in range(order + 1):
        out.append(term)
        term = term * rate / (i + 1)
    return PowerSeries(tuple(out), center_label)


def poly_from_roots(roots: Sequence[Scalar], order: int, lead: Scalar = 1) -> PowerSeries:
    """lead * prod (w - r), truncated at ``order``."""
    c = [mpf(lead)] + [mpf(0)] * order
    for r in roots:
        for i in range(order, 0, -1):
            c[i] = c[i - 1] - r * c[i]
        c[0] = -r * c[0]
    return PowerSeries(tuple(c))


def compensated_sum(values: Iterable[Scalar]) -> mpf:
    """Exact-then-rounded sum of HPReal terms (mpmath.fsum)."""
    return mpmath.fsum(values)


__all__ = [
    "HPReal", "DEFAULT_PREC", "MIN_PREC", "GUARD_BITS", "DEFAULT_SERIES_ORDER",
    "PrecisionError", "SeriesError", "check_prec", "precision", "hp", "ulp_bound",
    "PowerSeries", "series_mul", "series_exp", "series_div", "series_deriv",
    "series_integral", "series_log", "exp_linear", "poly_from_roots", "compensated_sum",
]
