"""Verification suites shared by the CLI, the scripts and the acceptance tests.

Each suite returns a :class:`SuiteResult`; nothing here prints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import mpmath
from mpmath import mpf

from . import constants as C
from . import expansion as E
from . import oracle as O
from .gammaderiv import gamma_double_prime, gamma_prime, inv_gamma_derivative_closed, inv_gamma_jet
from .numkernel import check_prec, precision
from .polylog import ACCEPTANCE_X_GRID, appendix_bound_suite
from .zetaprime import eta_coeffs, log_zeta_derivative_fd, zeta_int

TIGHT_BITS = 168


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str
    rows: list = field(default_factory=list)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def load_reference_ratios() -> dict:
    text = (resources.files("mertens") / "testdata" / "ratio_ref.txt").read_text()
    out = {}
    for line in text.splitlines():
        if line.strip() and not line.startswith("#"):
            j, v = line.split()
            out[int(j)] = v
    return out


# ---------------------------------------------------------------------------
# constants


def ratio_table_suite(jmax: int = 26, prec: int | None = None, tol: float = 5e-7) -> SuiteResult:
    """The reference digits are truncated, so entry d stands for [d, d + 1e-6):
    compare against its midpoint with the stated tolerance."""
    prec = check_prec(prec)
    ref = load_reference_ratios()
    rows, bad = [], []
    for j, val in C.ratio_table(jmax, prec):
        d = mpf(ref[j])
        dev = float(val - (d + mpf("5e-7")))
        ok = abs(dev) <= tol
        rows.append({"j": j, "ratio": val, "reference": ref[j], "midpoint_dev": dev, "ok": ok})
        if not ok:
            bad.append(j)
    worst = max(abs(r["midpoint_dev"]) for r in rows)
    detail = f"{jmax - len(bad)}/{jmax} ratios inside the truncation interval (max midpoint dev {worst:.2e})"
    if bad:
        detail += f"; failing j = {bad}"
    return SuiteResult("ratio table", not bad, detail, rows)


def _truncates_to(value, digits: str) -> bool:
    places = len(digits.split(".")[1])
    scale = 10**places
    return math.floor(float(value) * scale) == round(float(digits) * scale)


def named_constants_suite(prec: int | None = None) -> SuiteResult:
    prec = check_prec(prec)
    a1 = C.alpha(1, prec)
    b = C.beta(prec)
    ok1 = _truncates_to(a1, "1.332582")
    ok2 = _truncates_to(b, "0.2614")
    detail = f"alpha_1 = {mpmath.nstr(a1, 12)}, beta = {mpmath.nstr(b, 12)}"
    return SuiteResult("named constants", ok1 and ok2, detail,
                       [{"name": "alpha_1", "value": a1, "ok": ok1}, {"name": "beta", "value": b, "ok": ok2}])


# ---------------------------------------------------------------------------
# expansion generator


def generator_suite(N: int = 5, prec: int | None = None, bits: int = TIGHT_BITS) -> SuiteResult:
    """Generator output against every closed form at 2^-bits."""
    prec = check_prec(prec)
    t = C.default_table(prec)
    tol = mpf(2) ** (-bits)
    checks = []

    def add(name, got, want):
        with precision(prec):
            dev = abs(mpf(got) - mpf(want))
        checks.append({"check": name, "dev": dev, "ok": dev <= tol})

    with precision(prec + 32):
        z2, z3 = zeta_int(2, prec + 32), zeta_int(3, prec + 32)
        s2 = E.generate_Sk(2, N, t, prec)
        s3 = E.generate_Sk(3, N, t, prec)
        for j in range(1, N + 1):
            add(f"S2 1/L^{j}", s2.coefficient(0, j), 2 * t.a(j))
            add(f"S3 Z/L^{j}", s3.coefficient(1, j), 6 * t.a(j))
            add(f"S3 1/L^{j}", -s3.coefficient(0, j), E.v_coeff(j, t, prec))
        add("S2 main Z^0", s2.coefficient(0, 0), -z2)
        add("v_1", E.v_coeff(1, t, prec), 0)
        add("v_2", E.v_coeff(2, t, prec), 6 * t.a(2) + 3 * t.a(1) ** 2)
        add("v_3", E.v_coeff(3, t, prec), 9 * t.a(3) + 12 * t.a(1) * t.a(2))
        s4 = E.generate_Sk(4, 2, t, prec)
        a1, a2 = t.a(1), t.a(2)
        want1 = [-12 * a1 * z2, 0, 12 * a1]
        want2 = [12 * a1**2 - 12 * a2 * z2, -12 * (a1**2 + 2 * a2), 12 * a2]
        for b in range(3):
            add(f"S4 Z^{b}/L", s4.coefficient(b, 1), want1[b])
            add(f"S4 Z^{b}/L^2", s4.coefficient(b, 2), want2[b])
        add("t_1", E.t_from_generator(1, 2, t, prec), t.aja(1, 3))
        add("t_2", E.t_from_generator(2, 2, t, prec), E.t_coeff(2, t, prec))
        add("r_1", E.r_from_generator(1, t, prec), t.aja(1, 2))
        add("r_2", E.r_from_generator(2, t, prec), t.aja(2, 2) + t.a(2) + t.a(1) ** 2 / 2)
        add("r_3", E.r_from_generator(3, t, prec), 4 * t.aja(3, 2) / 3 + 3 * t.a(3) / 2 + 2 * t.a(1) * t.a(2))
        for k in range(2, 6):
            for M in range(1, 6):
                d = E.leading_term_check(k, M, t, prec)
                add(f"leading k={k} M={M}", d["leading"], d["leading_predicted"])
                if k >= 3:
                    add(f"next k={k} M={M}", d["next"], d["next_predicted"])
        for k in range(2, 6):
            add(f"1/L pattern k={k}", E.one_over_log_check(k, t, prec), 0)
    bad = [c["check"] for c in checks if not c["ok"]]
    worst = max(c["dev"] for c in checks)
    detail = f"{len(checks) - len(bad)}/{len(checks)} identities within 2^-{bits} (max dev {mpmath.nstr(worst, 3)})"
    if bad:
        detail += f"; failing {bad}"
    return SuiteResult("generator identities", not bad, detail, checks)


# ---------------------------------------------------------------------------
# sieve against expansions

R_EVAL = {2: E.eval_R2, 3: E.eval_R3, 4: E.eval_R4}
CONVERGENCE_GRID = {
    2: (range(0, 4), (10**5, 10**6, 10**7)),
    3: (range(0, 3), (10**5, 10**6, 10**7)),
    4: (range(0, 3), (10**4, 10**5, 10**6)),
}


def convergence_grid(k: int, Ns, xs, prec: int | None = None) -> dict:
    """|R_k(x) - eval_Rk(x, N)| over the grid, with the monotonicity and envelope verdicts."""
    prec = check_prec(prec)
    t = C.default_table(prec)
    Ns, xs = list(Ns), list(xs)
    res = {}
    for x in xs:
        r = O.rk_sieve(k, x, prec).value
        for N in Ns:
            res[(x, N)] = abs(float(r - R_EVAL[k](x, N, t, prec)))
    in_N = {x: all(res[(x, a)] > res[(x, b)] for a, b in zip(Ns, Ns[1:])) for x in xs}
    in_x = {N: all(res[(a, N)] > res[(b, N)] for a, b in zip(xs, xs[1:])) for N in Ns}
    spread = {}
    for N in Ns:
        cs = [res[(x, N)] * math.log(x) ** (N + 1) for x in xs]
        spread[N] = max(cs) / min(cs)
    return {"k": k, "Ns": Ns, "xs": xs, "residual": res, "monotone_in_N": in_N,
            "monotone_in_x": in_x, "envelope_spread": spread,
            "envelope_ok": {N: s <= 10 for N, s in spread.items()}}


def sieve_convergence_suite(prec: int | None = None, grid=None) -> SuiteResult:
    grid = CONVERGENCE_GRID if grid is None else grid
    failures, rows = [], []
    for k, (Ns, xs) in grid.items():
        g = convergence_grid(k, Ns, xs, prec)
        rows.append(g)
        failures += [f"k={k} x={x} not decreasing in N" for x, ok in g["monotone_in_N"].items() if not ok]
        failures += [f"k={k} N={N} not decreasing in x" for N, ok in g["monotone_in_x"].items() if not ok]
        failures += [f"k={k} N={N} envelope spread {g['envelope_spread'][N]:.1f} > 10"
                     for N, ok in g["envelope_ok"].items() if not ok]
    detail = "all monotone and inside the envelope" if not failures else "; ".join(failures)
    return SuiteResult("sieve convergence", not failures, detail, rows)


def pq_a_suite(prec: int | None = None, Nmax: int = 4, xs=(10**6, 10**7)) -> SuiteResult:
    prec = check_prec(prec)
    t = C.default_table(prec)
    rows, bad = [], []
    for a in (2, 3):
        ex = E.expand_pq_a(a, Nmax, t, prec)
        for x in xs:
            s = O.pq_a_sum(a, x, prec).value
            res = [abs(float(s - ex.evaluate(x, N))) for N in range(Nmax + 1)]
            ok = all(p > q for p, q in zip(res, res[1:]))
            rows.append({"a": a, "x": x, "residuals": res, "ok": ok})
            if not ok:
                bad.append((a, x))
    detail = f"residuals shrink for N = 0..{Nmax} in {len(rows) - len(bad)}/{len(rows)} cases"
    return SuiteResult("pq^a expansions", not bad, detail, rows)


def identity_suite(xs=(10**4, 10**5, 10**6), tol: float = 1e-10, prec: int | None = None) -> SuiteResult:
    checks = O.identity_suite(xs, prec)
    rows = [{"name": c.name, "x": c.x, "diff": c.diff, "budget": c.budget,
             "ok": c.passed and c.budget < tol} for c in checks]
    bad = [f"{r['name']} x={r['x']}" for r in rows if not r["ok"]]
    worst = max(r["diff"] for r in rows)
    detail = f"{len(rows) - len(bad)}/{len(rows)} decompositions exact to budget (max diff {worst:.1e}, budgets < {tol:g})"
    if bad:
        detail += f"; failing {bad}"
    return SuiteResult("finite-x identities", not bad, detail, rows)


# ---------------------------------------------------------------------------
# special functions


def appendix_suite(k_max: int = 200, x_grid=ACCEPTANCE_X_GRID, prec: int | None = None) -> SuiteResult:
    rep = appendix_bound_suite(x_grid, k_max, prec)
    summ = rep.summary()
    detail = ", ".join(f"{n} {v['checked'] - v['failed']}/{v['checked']}" for n, v in summ.items())
    detail += f"; polylog constant {mpmath.nstr(rep.polylog_constant, 6)}"
    return SuiteResult("appendix bounds", rep.passed, detail, rep.checks)


def gamma_suite(M_max: int = 12, prec: int | None = None, bits: int = TIGHT_BITS) -> SuiteResult:
    prec = check_prec(prec)
    tol = mpf(2) ** (-bits)
    rows = []
    with precision(prec):
        for M in range(1, M_max + 1):
            jet = inv_gamma_jet(M, 3, prec).derivs
            for n in (1, 2, 3):
                dev = abs(jet[n] - inv_gamma_derivative_closed(n, M, prec))
                rows.append({"check": f"(1/Gamma)^({n})(1-{M})", "dev": dev, "ok": dev <= tol})
        # Gamma at 1 from the jet of 1/Gamma there
        f0, f1, f2 = inv_gamma_jet(0, 2, prec).derivs
        g1 = -f1 / f0**2
        g2 = (2 * f1**2 - f0 * f2) / f0**3
        gam = +mpmath.euler
        for name, got, want in (
            ("Gamma'(1) = -gamma", g1, -gam),
            ("Gamma''(1) = gamma^2 + zeta(2)", g2, gam**2 + zeta_int(2, prec)),
            ("gamma_prime(1)", gamma_prime(1, prec), g1),
            ("gamma_double_prime(1)", gamma_double_prime(1, prec), g2),
        ):
            dev = abs(got - want)
            rows.append({"check": name, "dev": dev, "ok": dev <= tol})
    bad = [r["check"] for r in rows if not r["ok"]]
    worst = max(r["dev"] for r in rows)
    detail = f"{len(rows) - len(bad)}/{len(rows)} within 2^-{bits} (max dev {mpmath.nstr(worst, 3)})"
    return SuiteResult("gamma derivatives", not bad, detail, rows)


def eta_suite(J_max: int = 20, s: str = "1.25", prec: int | None = None) -> SuiteResult:
    """Partial sums of the eta series against g(s) evaluated from zeta directly."""
    prec = check_prec(prec)
    tab = eta_coeffs(J_max, prec)
    with precision(prec):
        s = mpf(s)
        g = log_zeta_derivative_fd(s, prec) - 1 / (s - 1)
        errs = [abs(g - tab.evaluate(s, J)) for J in range(J_max + 1)]
        eta0 = abs(tab[0] + mpmath.euler)
    decreasing = all(a > b for a, b in zip(errs, errs[1:]))
    # geometric: log-linear fit slope clearly negative
    ys = [float(mpmath.log(e)) for e in errs]
    n = len(ys)
    xbar, ybar = (n - 1) / 2, sum(ys) / n
    slope = sum((i - xbar) * (y - ybar) for i, y in enumerate(ys)) / sum((i - xbar) ** 2 for i in range(n))
    ratio = math.exp(slope)
    ok = decreasing and ratio < 0.5 and eta0 < mpf("1e-30")
    detail = (f"errors {mpmath.nstr(errs[0], 3)} -> {mpmath.nstr(errs[-1], 3)}, fitted ratio {ratio:.3f}, "
              f"|eta_0 + gamma| = {mpmath.nstr(eta0, 3)}")
    return SuiteResult("eta series", ok, detail, [{"J": J, "err": e} for J, e in enumerate(errs)])


def growth_suite(prec: int | None = None, j_max: int = 40) -> SuiteResult:
    rep = E.growth_diagnostics(range(5, j_max + 1), None, prec)
    rs = [float(r["r_ratio"]) for r in rep["rows"]]
    vs = [float(r["v_ratio"]) for r in rep["rows"]]
    detail = f"r ratios in [{min(rs):.3f}, {max(rs):.3f}], v ratios in [{min(vs):.3f}, {max(vs):.3f}]"
    return SuiteResult("coefficient growth", rep["bounded"], detail, rep["rows"])


def convergent_formula_suite(prec: int | None = None, plimit: int = 10**7) -> SuiteResult:
    rows, bad = [], []
    for j in (1, 2, 3):
        est = C.alpha_via_convergent_formula(j, plimit, prec)
        ref = C.alpha(j, prec)
        dev = abs(float(est.value - ref))
        ok = dev <= float(est.budget)
        rows.append({"j": j, "dev": dev, "budget": float(est.budget), "ok": ok})
        if not ok:
            bad.append(j)
    detail = ", ".join(f"j={r['j']}: {r['dev']:.1e} (budget {r['budget']:.1e})" for r in rows)
    return SuiteResult("alpha two routes", not bad, detail, rows)


def run_all(quick: bool = False, prec: int | None = None) -> list:
    """Every suite in a fixed order; quick mode trims the expensive grids."""
    out = [
        named_constants_suite(prec),
        gamma_suite(prec=prec),
        eta_suite(prec=prec),
        appendix_suite(k_max=60 if quick else 200, prec=prec),
        generator_suite(N=3 if quick else 5, prec=prec),
        identity_suite(xs=(10**4,) if quick else (10**4, 10**5, 10**6), prec=prec),
    ]
    if not quick:
        out += [
            ratio_table_suite(prec=prec),
            pq_a_suite(prec=prec),
            convergent_formula_suite(prec=prec),
            sieve_convergence_suite(prec=prec),
        ]
    return out
