"""Fine-scale expansions of S_k(x) and R_k(x).

An :class:`Expansion` is a finite sum of terms c * Z^b / log(x)^M.  The
canonical variable is Z = log log x + beta (``centered=True``); the raw form
uses Y = log log x.  Both are related by exact binomial shifts.

generate_Sk follows the Hankel-contour route: expand
(log(1/s) + sum_{i<=N} h_i s^i / i!)^k by the multinomial theorem and replace
each (log 1/s)^m s^M by

    I(m, M, x) = sum_{j<=m} C(m, j) Y^j / log(x)^M * (1/Gamma)^{(m-j)}(1 - M)

with h_0 = beta - gamma and h_i = (-1)^(i-1) i alpha_i.

Truncation convention: an expansion of order N keeps 1/log^M x for M <= N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb

import mpmath
from mpmath import mpf

from .constants import ConstantsTable, default_table
from .gammaderiv import inv_gamma_jet
from .numkernel import check_prec, precision
from .zetaprime import zeta_int

MAX_K = 6
MAX_N = 8
GUARD = 32


class ExpansionLimitError(ValueError):
    pass


@dataclass(frozen=True)
class ExpansionTerm:
    coeff: mpf
    llx_pow: int
    lx_pow: int


@dataclass
class Expansion:
    """sum over (b, M) of coeffs[(b, M)] * V^b / log(x)^M.

    V is log log x + beta when ``centered_on_beta`` holds, else log log x.
    """

    k: int
    N: int
    coeffs: dict
    centered_on_beta: bool = True
    beta: mpf = None
    label: str = ""
    prec: int = 192
    unverified: tuple = field(default_factory=tuple)

    @property
    def terms(self) -> list:
        return [ExpansionTerm(c, b, M) for (b, M), c in sorted(self.coeffs.items())]

    def coefficient(self, b: int, M: int) -> mpf:
        return self.coeffs.get((b, M), mpf(0))

    def polynomial(self, M: int) -> list:
        """Coefficients [c_0, c_1, ...] of the V-polynomial multiplying 1/log^M x."""
        deg = max([b for (b, m) in self.coeffs if m == M], default=-1)
        return [self.coefficient(b, M) for b in range(deg + 1)]

    def recentered(self, centered: bool) -> "Expansion":
        if centered == self.centered_on_beta:
            return self
        out: dict = {}
        with precision(self.prec + GUARD):
            shift = -self.beta if centered else self.beta
            for (b, M), c in self.coeffs.items():
                # V_old = V_new + shift
                for e in range(b + 1):
                    out[(e, M)] = out.get((e, M), mpf(0)) + c * comb(b, e) * shift ** (b - e)
        return Expansion(self.k, self.N, out, centered, self.beta, self.label, self.prec, self.unverified)

    def truncate(self, N: int) -> "Expansion":
        keep = {key: c for key, c in self.coeffs.items() if key[1] <= N}
        return Expansion(self.k, min(N, self.N), keep, self.centered_on_beta, self.beta,
                         self.label, self.prec, self.unverified)

    def evaluate(self, x, N: int | None = None) -> mpf:
        N = self.N if N is None else N
        with precision(self.prec + GUARD):
            x = mpf(x)
            L = mpmath.log(x)
            V = mpmath.log(L) + (self.beta if self.centered_on_beta else 0)
            total = mpmath.fsum(c * V**b / L**M for (b, M), c in self.coeffs.items() if M <= N)
        with precision(self.prec):
            return +total

    def __add__(self, other: "Expansion") -> "Expansion":
        if other.centered_on_beta != self.centered_on_beta:
            other = other.recentered(self.centered_on_beta)
        out = dict(self.coeffs)
        with precision(max(self.prec, other.prec) + GUARD):
            for key, c in other.coeffs.items():
                out[key] = out.get(key, mpf(0)) + c
        return Expansion(self.k, min(self.N, other.N), out, self.centered_on_beta, self.beta,
                         self.label, self.prec, self.unverified + other.unverified)

    def scaled(self, factor) -> "Expansion":
        with precision(self.prec + GUARD):
            out = {key: c * factor for key, c in self.coeffs.items()}
        return Expansion(self.k, self.N, out, self.centered_on_beta, self.beta, self.label,
                         self.prec, self.unverified)

    def rounded(self) -> "Expansion":
        with precision(self.prec):
            out = {key: +c for key, c in self.coeffs.items()}
        return Expansion(self.k, self.N, out, self.centered_on_beta, self.beta, self.label,
                         self.prec, self.unverified)


def _table(table: ConstantsTable | None, prec: int) -> ConstantsTable:
    return table if table is not None else default_table(prec)


# ---------------------------------------------------------------------------
# closed-form coefficients


def r_coeff(j: int, table: ConstantsTable | None = None, prec: int | None = None) -> mpf:
    """r_j = 2^(j-1) alpha_{j,2}/j + sum_{i<j} (alpha_j/i + i C(j-1,i) alpha_i alpha_{j-i}/2)."""
    prec = check_prec(prec)
    if j < 1:
        raise ValueError("j must be >= 1")
    t = _table(table, prec)
    with precision(prec + GUARD):
        val = mpf(2) ** (j - 1) * t.aja(j, 2) / j
        for i in range(1, j):
            val += t.a(j) / i + i * comb(j - 1, i) * t.a(i) * t.a(j - i) / 2
    with precision(prec):
        return +val


def v_coeff(k: int, table: ConstantsTable | None = None, prec: int | None = None) -> mpf:
    """v_k = 3 sum_{j<k} (2 alpha_k/j + j C(k-1, j) alpha_j alpha_{k-j})."""
    prec = check_prec(prec)
    if k < 1:
        raise ValueError("k must be >= 1")
    t = _table(table, prec)
    with precision(prec + GUARD):
        val = mpf(0)
        for j in range(1, k):
            val += 2 * t.a(k) / j + j * comb(k - 1, j) * t.a(j) * t.a(k - j)
        val *= 3
    with precision(prec):
        return +val


def t_coeff(j: int, table: ConstantsTable | None = None, prec: int | None = None) -> mpf:
    """Closed forms t_1 = alpha_{1,3}, t_2 = 3 alpha_{2,3}/2 - (alpha_{2,2} + alpha_1 alpha_{1,2} + alpha_1^2/2)."""
    prec = check_prec(prec)
    t = _table(table, prec)
    with precision(prec + GUARD):
        if j == 1:
            val = t.aja(1, 3)
        elif j == 2:
            val = 3 * t.aja(2, 3) / 2 - (t.aja(2, 2) + t.a(1) * t.aja(1, 2) + t.a(1) ** 2 / 2)
        else:
            raise NotImplementedError("t_j for j >= 3 is only available through generate_R4")
    with precision(prec):
        return +val


def _h_values(N: int, t: ConstantsTable) -> list:
    """h^{(i)}(0) for i = 0..N."""
    h = [t.beta - t.gamma]
    for i in range(1, N + 1):
        h.append((-1) ** (i - 1) * i * t.a(i))
    return h


def _compositions(k: int, N: int):
    """Yield (m, ks, M): m + sum ks = k, M = sum i ks[i] <= N."""
    ks = [0] * (N + 1)

    def rec(i: int, left: int, M: int):
        if i > N:
            yield left, tuple(ks), M
            return
        step = max(i, 0)
        c = 0
        while c <= left and M + step * c <= N:
            ks[i] = c
            yield from rec(i + 1, left - c, M + step * c)
            c += 1
        ks[i] = 0

    yield from rec(0, k, 0)


def generate_Sk(k: int, N: int, table: ConstantsTable | None = None,
                prec: int | None = None, centered: bool = True) -> Expansion:
    """Coefficients of S_k(x) through 1/log^N x."""
    prec = check_prec(prec)
    if not 1 <= k <= MAX_K:
        raise ExpansionLimitError(f"k must be in 1..{MAX_K}")
    if not 0 <= N <= MAX_N:
        raise ExpansionLimitError(f"N must be in 0..{MAX_N}")
    t = _table(table, prec)
    wp = prec + GUARD
    jets = {M: inv_gamma_jet(M, k, wp).derivs for M in range(N + 1)}
    raw: dict = {}
    with precision(wp):
        h = _h_values(N, t)
        hfac = [h[i] / math.factorial(i) for i in range(N + 1)]
        kfact = math.factorial(k)
        for m, ks, M in _compositions(k, N):
            if m == 0 and M >= 1:
                continue  # I(0, M, x) = 0 for M >= 1
            c = mpf(kfact) / math.factorial(m)
            for i, ki in enumerate(ks):
                if ki:
                    c *= hfac[i] ** ki / math.factorial(ki)
            jet = jets[M]
            for j in range(m + 1):
                d = jet[m - j]
                if d == 0:
                    continue
                key = (j, M)
                raw[key] = raw.get(key, mpf(0)) + c * comb(m, j) * d
    ex = Expansion(k, N, raw, False, t.beta, f"S_{k}", prec)
    ex = ex.recentered(True) if centered else ex
    return _drop_zeros(ex)


def _drop_zeros(ex: Expansion) -> Expansion:
    # exact zeros only; tiny round-off values are kept so callers see them
    ex.coeffs = {key: c for key, c in ex.coeffs.items() if c != 0}
    return ex.rounded()


def recenter_check(ex: Expansion) -> mpf:
    """Max coefficient drift after centered -> raw -> centered."""
    back = ex.recentered(not ex.centered_on_beta).recentered(ex.centered_on_beta)
    keys = set(ex.coeffs) | set(back.coeffs)
    return max((abs(ex.coefficient(*k) - back.coefficient(*k)) for k in keys), default=mpf(0))


# ---------------------------------------------------------------------------
# leading-term propositions


def leading_term_check(k: int, M: int, table: ConstantsTable | None = None,
                       prec: int | None = None) -> dict:
    """Generator coefficients of Y^(k-2)/log^M x and Y^(k-3)/log^M x (Y = log log x)
    next to the closed-form predictions."""
    prec = check_prec(prec)
    if k < 2 or M < 1:
        raise ValueError("need k >= 2 and M >= 1")
    t = _table(table, prec)
    ex = generate_Sk(k, M, t, prec, centered=False)
    with precision(prec + GUARD):
        out = {
            "leading": ex.coefficient(k - 2, M),
            "leading_predicted": k * (k - 1) * t.a(M),
        }
        if k >= 3:
            h1 = mpmath.fsum(mpf(1) / i for i in range(1, M))
            s = mpmath.fsum(i * comb(M - 1, i) * t.a(i) * t.a(M - i) for i in range(1, M))
            out["next"] = ex.coefficient(k - 3, M)
            out["next_predicted"] = k * (k - 1) * (k - 2) * (t.a(M) * (t.beta - h1) - s / 2)
    with precision(prec):
        return {key: +v for key, v in out.items()}


def main_polynomial(k: int, table: ConstantsTable | None = None, prec: int | None = None) -> list:
    """Centered M = 0 polynomial of S_k, lowest degree first (S_0 = 1)."""
    if k == 0:
        return [mpf(1)]
    return generate_Sk(k, 0, table, prec).polynomial(0)


def one_over_log_check(k: int, table: ConstantsTable | None = None, prec: int | None = None) -> mpf:
    """Max deviation between the 1/log x polynomial of S_k and k(k-1) alpha_1 times
    the main polynomial of S_{k-2}; checked for 2 <= k <= 5 only."""
    prec = check_prec(prec)
    if not 2 <= k <= 5:
        raise ExpansionLimitError("the 1/log x pattern is checked for 2 <= k <= 5")
    t = _table(table, prec)
    got = generate_Sk(k, 1, t, prec).polynomial(1)
    base = main_polynomial(k - 2, t, prec)
    with precision(prec + GUARD):
        want = [k * (k - 1) * t.a(1) * c for c in base]
        n = max(len(got), len(want))
        got += [mpf(0)] * (n - len(got))
        want += [mpf(0)] * (n - len(want))
        dev = max(abs(g - w) for g, w in zip(got, want))
    with precision(prec):
        return +dev


# ---------------------------------------------------------------------------
# R_k assemblies


def _const_expansion(k: int, N: int, value, t: ConstantsTable, prec: int) -> Expansion:
    return Expansion(k, N, {(0, 0): value}, True, t.beta, "", prec)


def expand_pq_a(a: int, N: int, table: ConstantsTable | None = None,
                prec: int | None = None) -> Expansion:
    """sum_{p q^a <= x} 1/(p q^a) = P(a) Z - sum_{j<=N} a^j alpha_{j,a} / (j log^j x)."""
    prec = check_prec(prec)
    if a < 2:
        raise ValueError("a must be >= 2")
    t = _table(table, prec)
    with precision(prec + GUARD):
        co = {(1, 0): t.P(a)}
        for j in range(1, N + 1):
            co[(0, j)] = -mpf(a) ** j * t.aja(j, a) / j
    return Expansion(0, N, co, True, t.beta, f"pq^{a}", prec).rounded()


def expand_p2qr(N: int, table: ConstantsTable | None = None, prec: int | None = None) -> Expansion:
    """sum_{p^2 q r <= x} 1/(p^2 q r) = sum_p p^-2 S_2(x/p^2), expanded in 1/log x.

    With L = log x, log log(x/p^2) = log log x - sum_m (2 log p)^m/(m L^m) and
    1/log^j(x/p^2) = L^-j sum_n C(j+n-1, n) (2 log p/L)^n; summing over p turns
    log(p)^n/p^2 into alpha_{n,2}.
    """
    prec = check_prec(prec)
    t = _table(table, prec)
    co: dict = {}

    def add(key, v):
        co[key] = co.get(key, mpf(0)) + v

    with precision(prec + GUARD):
        P2 = t.P(2)
        z2 = zeta_int(2, prec + GUARD)
        add((2, 0), P2)
        add((0, 0), -z2 * P2)
        for m in range(1, N + 1):
            add((1, m), -2 * mpf(2) ** m * t.aja(m, 2) / m)
        for n in range(2, N + 1):
            w = mpmath.fsum(mpf(1) / (m1 * (n - m1)) for m1 in range(1, n))
            add((0, n), mpf(2) ** n * t.aja(n, 2) * w)
        for j in range(1, N + 1):
            for n in range(0, N - j + 1):
                add((0, j + n), 2 * t.a(j) * comb(j + n - 1, n) * mpf(2) ** n * t.aja(n, 2))
    return Expansion(0, N, co, True, t.beta, "p^2qr", prec).rounded()


def generate_R2(N: int, table: ConstantsTable | None = None, prec: int | None = None) -> Expansion:
    prec = check_prec(prec)
    t = _table(table, prec)
    s2 = generate_Sk(2, N, t, prec).scaled(mpf(1) / 2)
    with precision(prec + GUARD):
        c = _const_expansion(2, N, t.P(2) / 2, t, prec)
    ex = s2 + c
    ex.k, ex.label = 2, "R_2"
    return ex.rounded()


def generate_R3(N: int, table: ConstantsTable | None = None, prec: int | None = None) -> Expansion:
    prec = check_prec(prec)
    t = _table(table, prec)
    with precision(prec + GUARD):
        parts = [
            generate_Sk(3, N, t, prec).scaled(mpf(1) / 6),
            expand_pq_a(2, N, t, prec).scaled(mpf(1) / 2),
            _const_expansion(3, N, t.P(3) / 3, t, prec),
        ]
    ex = parts[0] + parts[1] + parts[2]
    ex.k, ex.label = 3, "R_3"
    return ex.rounded()


def generate_R4(N: int, table: ConstantsTable | None = None, prec: int | None = None) -> Expansion:
    """24 R_4 = S_4 + 6 p^2qr + 3 P(2)^2 + 8 pq^3 + 6 P(4), each piece expanded."""
    prec = check_prec(prec)
    if not 0 <= N <= 4:
        raise ExpansionLimitError("generate_R4 supports N <= 4")
    t = _table(table, prec)
    with precision(prec + GUARD):
        parts = [
            generate_Sk(4, N, t, prec),
            expand_p2qr(N, t, prec).scaled(6),
            expand_pq_a(3, N, t, prec).scaled(8),
            _const_expansion(4, N, 3 * t.P(2) ** 2 + 6 * t.P(4), t, prec),
        ]
        ex = parts[0]
        for p in parts[1:]:
            ex = ex + p
        ex = ex.scaled(mpf(1) / 24)
    ex.k, ex.label = 4, "R_4"
    ex.unverified = tuple(f"t_{j}" for j in range(3, N + 1))
    return ex.rounded()


def t_from_generator(j: int, N: int | None = None, table: ConstantsTable | None = None,
                     prec: int | None = None) -> mpf:
    """t_j read off generate_R4.

    The Z^0 coefficient of 1/log^j x is alpha_j (P(2) - zeta(2))/2 - t_j.
    """
    prec = check_prec(prec)
    t = _table(table, prec)
    ex = generate_R4(max(j, N or j), t, prec)
    with precision(prec + GUARD):
        val = t.a(j) * (t.P(2) - zeta_int(2, prec + GUARD)) / 2 - ex.coefficient(0, j)
    with precision(prec):
        return +val


def r_from_generator(j: int, table: ConstantsTable | None = None, prec: int | None = None) -> mpf:
    ex = generate_R3(j, table, prec)
    with precision(ex.prec):
        return -ex.coefficient(0, j)


def eval_R2(x, N: int, table: ConstantsTable | None = None, prec: int | None = None) -> mpf:
    """1/2 Z^2 + (P(2) - zeta(2))/2 + sum_{j<=N} alpha_j / log^j x."""
    prec = check_prec(prec)
    if mpf(x) < 16:
        raise ValueError("eval_R2 needs x >= 16")
    t = _table(table, prec)
    with precision(prec + GUARD):
        L = mpmath.log(mpf(x))
        Z = mpmath.log(L) + t.beta
        val = Z**2 / 2 + (t.P(2) - zeta_int(2, prec + GUARD)) / 2
        for j in range(1, N + 1):
            val += t.a(j) / L**j
    with precision(prec):
        return +val


def eval_S2(x, N: int, table: ConstantsTable | None = None, prec: int | None = None) -> mpf:
    prec = check_prec(prec)
    t = _table(table, prec)
    with precision(prec + GUARD):
        L = mpmath.log(mpf(x))
        Z = mpmath.log(L) + t.beta
        val = Z**2 - zeta_int(2, prec + GUARD) + mpmath.fsum(2 * t.a(j) / L**j for j in range(1, N + 1))
    with precision(prec):
        return +val


def eval_S3(x, N: int, table: ConstantsTable | None = None, prec: int | None = None) -> mpf:
    prec = check_prec(prec)
    t = _table(table, prec)
    with precision(prec + GUARD):
        L = mpmath.log(mpf(x))
        Z = mpmath.log(L) + t.beta
        z2, z3 = zeta_int(2, prec + GUARD), zeta_int(3, prec + GUARD)
        val = Z**3 - 3 * z2 * Z + 2 * z3
        for j in range(1, N + 1):
            val += (6 * t.a(j) * Z - v_coeff(j, t, prec + GUARD)) / L**j
    with precision(prec):
        return +val


def eval_R3(x, N: int, table: ConstantsTable | None = None, prec: int | None = None) -> mpf:
    """Z^3/6 + (P(2)-zeta(2)) Z/2 + (P(3)+zeta(3))/3 + sum_{j<=N} (alpha_j Z - r_j)/log^j x."""
    prec = check_prec(prec)
    if mpf(x) < 16:
        raise ValueError("eval_R3 needs x >= 16")
    t = _table(table, prec)
    with precision(prec + GUARD):
        L = mpmath.log(mpf(x))
        Z = mpmath.log(L) + t.beta
        z2, z3 = zeta_int(2, prec + GUARD), zeta_int(3, prec + GUARD)
        val = Z**3 / 6 + (t.P(2) - z2) * Z / 2 + (t.P(3) + z3) / 3
        for j in range(1, N + 1):
            val += (t.a(j) * Z - r_coeff(j, t, prec + GUARD)) / L**j
    with precision(prec):
        return +val


def r4_constant_block(table: ConstantsTable | None = None, prec: int | None = None) -> mpf:
    """P(4)/4 + zeta(4)/16 + P(2)^2/8 - P(2) zeta(2)/4."""
    prec = check_prec(prec)
    t = _table(table, prec)
    with precision(prec + GUARD):
        z2, z4 = zeta_int(2, prec + GUARD), zeta_int(4, prec + GUARD)
        val = t.P(4) / 4 + z4 / 16 + t.P(2) ** 2 / 8 - t.P(2) * z2 / 4
    with precision(prec):
        return +val


def eval_R4(x, N: int, table: ConstantsTable | None = None, prec: int | None = None,
            use_generator: bool = False) -> mpf:
    """Closed-form R_4 expansion through 1/log^N x (N <= 2; N = 3 needs the generator's t_3)."""
    prec = check_prec(prec)
    if mpf(x) < 16:
        raise ValueError("eval_R4 needs x >= 16")
    if N > 3 or (N == 3 and not use_generator):
        raise ExpansionLimitError("eval_R4 supports N <= 2 (N = 3 with use_generator=True)")
    t = _table(table, prec)
    with precision(prec + GUARD):
        L = mpmath.log(mpf(x))
        Z = mpmath.log(L) + t.beta
        z2, z3 = zeta_int(2, prec + GUARD), zeta_int(3, prec + GUARD)
        val = (Z**4 / 24 + (t.P(2) - z2) * Z**2 / 4 + (t.P(3) + z3) * Z / 3
               + r4_constant_block(t, prec + GUARD))
        for j in range(1, N + 1):
            tj = t_from_generator(j, N, t, prec) if j >= 3 else t_coeff(j, t, prec + GUARD)
            val += (t.a(j) * (Z**2 + t.P(2) - z2) / 2 - r_coeff(j, t, prec + GUARD) * Z - tj) / L**j
    with precision(prec):
        return +val


def growth_diagnostics(j_range=range(5, 41), table: ConstantsTable | None = None,
                       prec: int | None = None) -> dict:
    """r_j/(1.5 alpha_j log j) and v_k/(9 alpha_k log k) over the range."""
    prec = check_prec(prec)
    t = _table(table, prec)
    rows = []
    with precision(prec):
        for j in j_range:
            lj = mpmath.log(j)
            r = r_coeff(j, t, prec)
            v = v_coeff(j, t, prec)
            rows.append({
                "j": j,
                "r": r,
                "v": v,
                "r_ratio": r / (mpf(3) / 2 * t.a(j) * lj),
                "v_ratio": v / (9 * t.a(j) * lj),
            })
    bounded = all(0.2 <= float(row["r_ratio"]) <= 5 and 0.2 <= float(row["v_ratio"]) <= 5 for row in rows)
    return {"rows": rows, "bounded": bounded}
