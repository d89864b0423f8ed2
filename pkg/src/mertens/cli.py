"""Command-line interface.

    mertens [--config FILE] [--prec BITS] [--prime-limit N] [--cache-dir DIR]
            [--format json|csv|text] GROUP VERB [options]

Configuration precedence: built-in defaults < config file < environment
(MERTENS_PREC_BITS, MERTENS_CACHE_DIR, MERTENS_PRIME_LIMIT, MERTENS_FORMAT)
< command-line flags.

Exit codes: 0 success, 1 a verification suite failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import subprocess
import sys
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path

import mpmath
from mpmath import mpf

from .numkernel import DEFAULT_PREC, MIN_PREC

SCHEMA_VERSION = "mertens.table/1"
FORMATS = ("json", "csv", "text")

TABLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "columns", "rows", "provenance"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "title": {"type": "string"},
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {"type": "array", "items": {"type": "object"}},
        "provenance": {
            "type": "object",
            "required": ["prime_limit", "prec_bits", "truncation", "git_describe"],
            "properties": {
                "prime_limit": {"type": "integer"},
                "prec_bits": {"type": "integer"},
                "truncation": {"type": "object"},
                "git_describe": {"type": "string"},
            },
        },
    },
}


class ConfigError(ValueError):
    pass


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    prec_bits: int = DEFAULT_PREC
    prime_limit: int = 10**8
    cache_dir: str = ""
    output_format: str = "csv"
    suite_tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.prec_bits < MIN_PREC:
            raise ConfigError(f"prec_bits must be >= {MIN_PREC}")
        if self.prime_limit < 10**4:
            raise ConfigError("prime_limit must be >= 10^4")
        if self.output_format not in FORMATS:
            raise ConfigError(f"output_format must be one of {FORMATS}")


CONFIG_KEYS = {"prec_bits", "prime_limit", "cache_dir", "output_format"}
ENV_KEYS = {
    "MERTENS_PREC_BITS": "prec_bits",
    "MERTENS_PRIME_LIMIT": "prime_limit",
    "MERTENS_CACHE_DIR": "cache_dir",
    "MERTENS_FORMAT": "output_format",
}


def parse_int(text: str) -> int:
    """Accepts 100000, 1e5, 10^5, 1_000_000."""
    s = str(text).strip().replace("_", "")
    if "^" in s:
        b, e = s.split("^", 1)
        if int(e) < 0:
            raise ValueError(f"not an integer: {text}")
        return int(b) ** int(e)
    try:
        return int(s)
    except ValueError:
        try:
            d = Decimal(s)
        except InvalidOperation:
            raise ValueError(f"not an integer: {text}") from None
        if not d.is_finite() or d != d.to_integral_value():
            raise ValueError(f"not an integer: {text}") from None
        return int(d)


def _coerce(key: str, value: str):
    if key in ("prec_bits", "prime_limit"):
        return parse_int(value)
    return value


def load_config_file(path: str | Path) -> dict:
    """Flat `key = value` lines, `#` comments; `tolerance.NAME = x` fills suite_tolerances."""
    out: dict = {}
    tols: dict = {}
    p = Path(path)
    try:
        lines = p.read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"{p}: cannot read config ({exc.strerror})") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{p}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.startswith("tolerance."):
            try:
                tols[key[len("tolerance."):]] = float(value)
            except ValueError:
                raise ConfigError(f"{p}:{lineno}: bad tolerance {value!r}") from None
            continue
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{p}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, value)
        except ValueError:
            raise ConfigError(f"{p}:{lineno}: bad value {value!r} for {key}") from None
    if tols:
        out["suite_tolerances"] = tols
    return out


def resolve_config(args: argparse.Namespace, env=None) -> RunConfig:
    env = os.environ if env is None else env
    values: dict = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for var, key in ENV_KEYS.items():
        if env.get(var):
            try:
                values[key] = _coerce(key, env[var])
            except ValueError:
                raise ConfigError(f"environment {var}: bad value {env[var]!r}") from None
    flags = {
        "prec_bits": getattr(args, "prec", None),
        "prime_limit": getattr(args, "prime_limit", None),
        "cache_dir": getattr(args, "cache_dir", None),
        "output_format": getattr(args, "format", None),
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# output


def git_describe() -> str:
    try:
        res = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             cwd=Path(__file__).resolve().parent, capture_output=True,
                             text=True, timeout=5)
        if res.returncode == 0 and res.stdout.strip():
            return res.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return "unknown"


def provenance(cfg: RunConfig, **truncation) -> dict:
    return {
        "prime_limit": cfg.prime_limit,
        "prec_bits": cfg.prec_bits,
        "truncation": {k: v for k, v in truncation.items()},
        "git_describe": git_describe(),
    }


def _digits(prec_bits: int) -> int:
    return max(15, int(prec_bits * 0.30103) - 2)


def format_value(v, prec_bits: int = DEFAULT_PREC):
    if isinstance(v, mpf):
        return mpmath.nstr(v, _digits(prec_bits), min_fixed=-6, max_fixed=6)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return [format_value(x, prec_bits) for x in v]
    return v


def emit_table(rows: list, fmt: str, columns: list | None = None, title: str = "",
               prov: dict | None = None, prec_bits: int = DEFAULT_PREC) -> str:
    """Render rows (dicts) with a stable column order."""
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}")
    if columns is None:
        columns = []
        for r in rows:
            columns += [c for c in r if c not in columns]
    cells = [[format_value(r.get(c, ""), prec_bits) for c in columns] for r in rows]
    if fmt == "json":
        doc = {
            "schema": SCHEMA_VERSION,
            "title": title,
            "columns": list(columns),
            "rows": [dict(zip(columns, row)) for row in cells],
            "provenance": prov or {},
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if prov:
            buf.write("# " + json.dumps(prov, sort_keys=True) + "\n")
        w.writerow(columns)
        for row in cells:
            w.writerow(["" if c is None else (json.dumps(c) if isinstance(c, list) else c) for c in row])
        return buf.getvalue()
    return _text_table(columns, cells, title, prov)


def _text_table(columns, cells, title, prov) -> str:
    strs = [[("" if c is None else str(c)) for c in row] for row in cells]
    out = []
    if title:
        out.append(title)
    widths = []
    aligned_cols = []
    for i, col in enumerate(columns):
        colvals = [row[i] for row in strs]
        numeric = colvals and all(_is_number(v) for v in colvals if v)
        if numeric:
            left = max((len(v.split(".")[0]) if "." in v else len(_int_part(v)) for v in colvals if v), default=0)
            padded = []
            for v in colvals:
                ip = v.split(".")[0] if "." in v else _int_part(v)
                padded.append(" " * (left - len(ip)) + v)
            right = max(len(v) for v in padded) if padded else 0
            colvals = [v.ljust(right) for v in padded]
        aligned_cols.append(colvals)
        widths.append(max([len(col)] + [len(v) for v in colvals]))
    out.append("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip())
    for r in range(len(strs)):
        out.append("  ".join(aligned_cols[i][r].ljust(widths[i]) for i in range(len(columns))).rstrip())
    if prov:
        out.append(f"# prec_bits={prov['prec_bits']} prime_limit={prov['prime_limit']} "
                   f"truncation={json.dumps(prov['truncation'], sort_keys=True)}")
    return "\n".join(out) + "\n"


def _int_part(v: str) -> str:
    for sep in ("e", "E"):
        if sep in v:
            return v.split(sep)[0]
    return v


def _is_number(v: str) -> bool:
    try:
        float(v)
        return True
    except ValueError:
        return False


# ---------------------------------------------------------------------------
# commands


def cmd_primes_build(cfg: RunConfig, a) -> tuple[list, dict, str]:
    from .primes import PrimeStore

    limit = parse_int(a.limit) if a.limit else cfg.prime_limit
    store = PrimeStore.load_or_build(limit, cfg.prec_bits, cfg.cache_dir or None)
    rows = [{"limit": store.limit, "primes": len(store.primes), "checkpoints": len(store.checkpoints),
             "mertens_sum": store.mertens_prefix(store.limit)}]
    return rows, {"limit": limit}, "prime store"


def cmd_constants_alpha(cfg, a):
    from .constants import alpha_result, alpha_via_convergent_formula, ratio_normalizer

    res = alpha_result(a.j, cfg.prec_bits)
    with mpmath.workprec(cfg.prec_bits):
        row = {"j": a.j, "alpha": res.value, "ratio": res.value / ratio_normalizer(a.j),
               "budget": float(res.budget), "k_max": res.k_max}
    plimit = parse_int(a.plimit) if a.plimit else None
    if a.convergent:
        est = alpha_via_convergent_formula(a.j, plimit or 10**7, cfg.prec_bits)
        row["alpha_convergent"] = est.value
        row["convergent_budget"] = float(est.budget)
    return [row], {"k_max": res.k_max, "plimit": plimit}, f"alpha_{a.j}"


def cmd_constants_table(cfg, a):
    from .constants import alpha, ratio_table

    rows = []
    for j, r in ratio_table(a.jmax, cfg.prec_bits):
        rows.append({"j": j, "ratio": r, "alpha": alpha(j, cfg.prec_bits)})
    return rows, {"jmax": a.jmax}, "alpha_j / (j! 2^j / (2 j^2))"


def cmd_constants_named(cfg, a):
    from .constants import alpha, beta, euler_gamma

    rows = [{"name": "gamma", "value": euler_gamma(cfg.prec_bits)},
            {"name": "beta", "value": beta(cfg.prec_bits)},
            {"name": "alpha_1", "value": alpha(1, cfg.prec_bits)}]
    return rows, {}, "named constants"


def cmd_zeta_eval(cfg, a):
    from .zetaprime import prime_zeta, zeta

    with mpmath.workprec(cfg.prec_bits + 16):
        s = mpf(a.s)
    rows = [{"s": a.s, "zeta": zeta(s, cfg.prec_bits), "prime_zeta": prime_zeta(s, cfg.prec_bits)}]
    return rows, {}, "zeta"


def cmd_zeta_eta(cfg, a):
    from .zetaprime import eta_coeffs

    tab = eta_coeffs(a.J, cfg.prec_bits)
    rows = [{"j": j, "eta": tab[j]} for j in range(a.J + 1)]
    return rows, {"J": a.J, "stieltjes": len(tab.stieltjes_used)}, "eta_j"


def _expansion_rows(ex) -> list:
    return [{"llx_pow": t.llx_pow, "lx_pow": t.lx_pow, "coeff": t.coeff} for t in ex.terms]


def cmd_expand_sk(cfg, a):
    from .expansion import generate_Sk

    ex = generate_Sk(a.k, a.N, None, cfg.prec_bits, centered=not a.raw)
    var = "log log x" if a.raw else "log log x + beta"
    return _expansion_rows(ex), {"N": a.N}, f"S_{a.k} coefficients of ({var})^b / log^M x"


def cmd_expand_rk(cfg, a):
    from . import expansion as E

    if a.x is None:
        gen = {2: E.generate_R2, 3: E.generate_R3, 4: E.generate_R4}
        if a.k not in gen:
            raise UsageError("expand rk supports k = 2, 3, 4")
        ex = gen[a.k](a.N, None, cfg.prec_bits)
        return _expansion_rows(ex), {"N": a.N}, f"R_{a.k} coefficients"
    evals = {2: E.eval_R2, 3: E.eval_R3, 4: E.eval_R4}
    if a.k not in evals:
        raise UsageError("expand rk supports k = 2, 3, 4")
    x = parse_int(a.x)
    rows = []
    sieve = None
    if a.compare_sieve:
        from .oracle import rk_sieve

        sieve = float(rk_sieve(a.k, x, cfg.prec_bits).value)
    for N in range(a.N + 1):
        v = evals[a.k](x, N, None, cfg.prec_bits)
        row = {"x": x, "N": N, "expansion": v}
        if sieve is not None:
            row["sieve"] = sieve
            row["residual"] = sieve - float(v)
        rows.append(row)
    return rows, {"N": a.N}, f"R_{a.k}({x})"


def _oracle_row(r) -> dict:
    # oracle sums are double-precision accumulations; print them as such
    return {"quantity": r.quantity, "x": r.x, "k": r.k_or_j, "value": float(r.value),
            "budget": r.abs_error_budget}


def cmd_oracle_rk(cfg, a):
    from .oracle import rk_sieve

    r = rk_sieve(a.k, parse_int(a.x), cfg.prec_bits, streaming=a.streaming)
    return [_oracle_row(r)], {}, "R_k oracle"


def cmd_oracle_sk(cfg, a):
    from .oracle import sk_recursive

    r = sk_recursive(a.k, parse_int(a.x), cfg.prec_bits)
    return [_oracle_row(r)], {}, "S_k oracle"


def cmd_oracle_identity(cfg, a):
    from .verify import identity_suite

    xs = tuple(parse_int(x) for x in a.x) if a.x else (10**4, 10**5, 10**6)
    tol = cfg.suite_tolerances.get("identities", 1e-10)
    res = identity_suite(xs, tol, cfg.prec_bits)
    rows = [{k: v for k, v in r.items()} for r in res.rows]
    return rows, {"x": list(xs)}, res.line(), res.passed


def cmd_polylog_verify(cfg, a):
    from .verify import appendix_suite

    res = appendix_suite(a.kmax, prec=cfg.prec_bits)
    fails = [c for c in res.rows if not c.passed]
    rows = [{"check": c.name, "k": c.k, "x": c.x, "passed": c.passed} for c in fails]
    return rows, {"kmax": a.kmax}, res.line(), res.passed


def cmd_verify_all(cfg, a):
    from .verify import run_all

    results = run_all(quick=a.quick, prec=cfg.prec_bits)
    rows = [{"suite": r.name, "passed": r.passed, "detail": r.detail} for r in results]
    ok = all(r.passed for r in results)
    return rows, {"quick": a.quick}, "verification", ok


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mertens", description="Higher Mertens constants and fine-scale expansions.")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--prec", type=int, help="binary precision (bits)")
    p.add_argument("--prime-limit", type=parse_int, help="prime store limit")
    p.add_argument("--cache-dir", help="directory for the prime cache")
    p.add_argument("--format", choices=FORMATS, help="output format")
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def fmt_flags(sp):
        sp.add_argument("--json", dest="format_flag", action="store_const", const="json")
        sp.add_argument("--csv", dest="format_flag", action="store_const", const="csv")
        sp.add_argument("--text", dest="format_flag", action="store_const", const="text")
        sp.add_argument("--prec", dest="prec_local", type=int, help=argparse.SUPPRESS)

    g = groups.add_parser("primes").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    sp = g.add_parser("build")
    sp.add_argument("--limit")
    fmt_flags(sp)
    sp.set_defaults(func=cmd_primes_build)

    g = groups.add_parser("constants").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    sp = g.add_parser("alpha")
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--plimit")
    sp.add_argument("--convergent", action="store_true", help="also evaluate the convergent-sum route")
    fmt_flags(sp)
    sp.set_defaults(func=cmd_constants_alpha)
    sp = g.add_parser("table")
    sp.add_argument("--jmax", type=int, default=26)
    fmt_flags(sp)
    sp.set_defaults(func=cmd_constants_table)
    sp = g.add_parser("named")
    fmt_flags(sp)
    sp.set_defaults(func=cmd_constants_named)

    g = groups.add_parser("zeta").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    sp = g.add_parser("eval")
    sp.add_argument("--s", required=True)
    fmt_flags(sp)
    sp.set_defaults(func=cmd_zeta_eval)
    sp = g.add_parser("eta")
    sp.add_argument("--J", type=int, default=32)
    fmt_flags(sp)
    sp.set_defaults(func=cmd_zeta_eta)

    g = groups.add_parser("expand").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    sp = g.add_parser("sk")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--N", type=int, default=3)
    sp.add_argument("--raw", action="store_true", help="polynomials in log log x instead of log log x + beta")
    fmt_flags(sp)
    sp.set_defaults(func=cmd_expand_sk)
    sp = g.add_parser("rk")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--N", type=int, default=2)
    sp.add_argument("--x")
    sp.add_argument("--compare-sieve", action="store_true")
    fmt_flags(sp)
    sp.set_defaults(func=cmd_expand_rk)

    g = groups.add_parser("oracle").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    for name, func in (("rk", cmd_oracle_rk), ("sk", cmd_oracle_sk)):
        sp = g.add_parser(name)
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--x", required=True)
        if name == "rk":
            sp.add_argument("--streaming", action="store_true")
        fmt_flags(sp)
        sp.set_defaults(func=func)
    sp = g.add_parser("identity-suite")
    sp.add_argument("--x", nargs="*")
    fmt_flags(sp)
    sp.set_defaults(func=cmd_oracle_identity)

    g = groups.add_parser("polylog").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    sp = g.add_parser("verify")
    sp.add_argument("--kmax", type=int, default=200)
    fmt_flags(sp)
    sp.set_defaults(func=cmd_polylog_verify)

    g = groups.add_parser("verify").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    sp = g.add_parser("all")
    sp.add_argument("--quick", action="store_true")
    fmt_flags(sp)
    sp.set_defaults(func=cmd_verify_all)
    return p


def run(argv=None, env=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"mertens: error: {exc}", file=err)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if getattr(args, "prec_local", None) is not None:
        args.prec = args.prec_local
    if getattr(args, "format_flag", None):
        args.format = args.format_flag
    try:
        cfg = resolve_config(args, env)
    except ConfigError as exc:
        print(f"mertens: config error: {exc}", file=err)
        return 2
    if cfg.cache_dir:
        os.environ["MERTENS_CACHE_DIR"] = cfg.cache_dir
    try:
        result = args.func(cfg, args)
    except UsageError as exc:
        print(f"mertens: error: {exc}", file=err)
        return 2
    except ValueError as exc:
        print(f"mertens: error: {exc}", file=err)
        return 2
    rows, trunc, title = result[:3]
    passed = result[3] if len(result) > 3 else True
    prov = provenance(cfg, **trunc)
    out.write(emit_table(rows, cfg.output_format, title=title, prov=prov, prec_bits=cfg.prec_bits))
    if args.group == "verify":
        for r in rows:
            print(f"{'PASS' if r['passed'] else 'FAIL'} {r['suite']}: {r['detail']}", file=err)
    return 0 if passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
