"""Command-line front end.

Subcommands::

    solve    eigenvalues by AIM
    exact    check / family / solution for the quasi-exact cases
    bounds   lower, sum-approximation and upper estimates
    table    regenerate the reference tables (--reproduce II|III)
    fig1     sum-approximation grid over (n, l)

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources

import gmpy2

from . import exact
from .aim import eigenvalue, spectrum
from .bounds import QuantumNumbers, bound_triple, fig1_curve, uncertainty_lower_bound
from .errors import AimSpectraError, NotExactlySolvableError, UnboundedBelowError, UnsupportedParameterError
from .numerics import DEFAULT_DIGITS, big, working_precision
from .problem import ProblemSpec, parse_radius

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
SOLVE_FIELDS = ["n", "l", "d", "a", "b", "R", "E", "N", "residual", "status"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    a: str | None = None
    b: str | None = None
    d: int = 3
    l: int = 0
    R: str | None = None
    n: int | None = None
    count: int | None = None
    digits: int = DEFAULT_DIGITS
    r0: str | None = None
    format: str = "csv"
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.digits < 30:
            raise UsageError("--digits must be >= 30")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")

    def spec(self) -> ProblemSpec:
        if self.a is None or self.b is None:
            raise UsageError("--a and --b are required")
        try:
            return ProblemSpec(self.a, self.b, self.d, self.l, self.R)
        except UnsupportedParameterError as exc:
            raise UsageError(str(exc)) from exc


def fmt(x, digits: int) -> str:
    """Plain decimal string with ``digits`` significant digits, trailing zeros dropped."""
    if x == 0:
        return "0"
    exp10 = int(math.floor(math.log10(abs(float(x)))))
    places = max(0, digits - 1 - exp10)
    s = format(x, f".{places}f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def fmt_energy(result) -> str:
    """Energy rounded to the digits that agreed between the last two AIM orders."""
    return fmt(result.E, max(1, result.digits_converged))


def fmt_residual(x) -> str:
    return format(float(x), ".3e")


def _radius_text(R) -> str:
    return "inf" if R is None else str(R)


# commands --------------------------------------------------------------------

def cmd_solve(cfg: RunConfig):
    spec = cfg.spec()
    if cfg.n is not None and cfg.count is not None:
        raise UsageError("give either --n or --count")
    base = dict(l=spec.l, d=spec.d, a=str(spec.a), b=str(spec.b), R=_radius_text(spec.R))
    try:
        if cfg.n is not None:
            results = [eigenvalue(spec, cfg.n, digits=cfg.digits, r0=cfg.r0)]
        else:
            results = spectrum(spec, cfg.count or 1, digits=cfg.digits, r0=cfg.r0)
    except AimSpectraError as exc:
        first = cfg.n if cfg.n is not None else 0
        return [dict(n=first, **base, E="", N="", residual="", status=f"failed: {exc}")], EXIT_NUMERIC
    rows = [dict(n=r.n_index, **base, E=fmt_energy(r), N=r.iterations,
                 residual=fmt_residual(r.residual), status="converged") for r in results]
    return rows, EXIT_OK


def cmd_exact(cfg: RunConfig):
    action, kind = cfg.extra["action"], cfg.extra["kind"]
    n, digits = cfg.n if cfg.n is not None else 0, cfg.digits
    if action == "family":
        return _exact_family(cfg, kind, n)
    spec = cfg.spec()
    if (kind == "confined") != spec.bounded:
        raise UsageError("--confined needs a finite --R and --free needs --R inf")
    if action == "check":
        report = (exact.free_constraint(n, spec, digits) if kind == "free"
                  else exact.confined_constraint(n, spec, digits))
        row = dict(kind=kind, n=n, k=spec.k, E=fmt(report.necessary_E, digits),
                   satisfied=bool(report.satisfied),
                   residuals=[fmt_residual(x) for x in report.residuals],
                   printed=[fmt_residual(x) for x in report.printed])
        return [row], EXIT_OK
    try:
        sol = exact.free_solution(n, spec, digits) if kind == "free" else exact.confined_solution(n, spec, digits)
    except NotExactlySolvableError as exc:
        raise UsageError(str(exc)) from exc
    upper = None if kind == "free" else spec.R
    nodes = exact.poly_real_roots(list(sol.poly), upper, digits).roots
    row = dict(kind=kind, n=n, k=spec.k, E=fmt(sol.E, digits), power=fmt(sol.power, digits),
               gauss_width=fmt(sol.gauss_width, digits), box_factor=sol.box_factor,
               poly=[fmt(c, digits) for c in sol.poly], nodes=[fmt(x, digits) for x in nodes])
    return [row], EXIT_OK


def _exact_family(cfg: RunConfig, kind: str, n: int):
    digits = cfg.digits
    k = cfg.extra.get("k") or (cfg.d + 2 * cfg.l)
    rows = []
    if kind == "confined":
        if cfg.R is None:
            raise UsageError("--confined family needs a finite --R")
        branches = ["+"] if n == 0 else ([cfg.extra["branch"]] if cfg.extra.get("branch") else ["+", "-"])
        for br in branches:
            try:
                a, b, E = exact.confined_parameter_family(n, br, k, cfg.R, digits)
            except UnsupportedParameterError as exc:
                raise UsageError(str(exc)) from exc
            rows.append(dict(kind=kind, n=n, k=k, branch=br if n else "", R=cfg.R,
                             a=fmt(a, digits), b=fmt(b, digits), E=fmt(E, digits)))
        return rows, EXIT_OK
    if cfg.a is None:
        raise UsageError("--free family needs --a")
    with working_precision(digits):
        for b in exact.solve_b_for_free_constraint(n, cfg.a, k, digits):
            E = (2 * n + k) * gmpy2.sqrt(b / 2)
            rows.append(dict(kind=kind, n=n, k=k, a=cfg.a, b=fmt(b, digits), E=fmt(E, digits)))
    return rows, EXIT_OK


def cmd_bounds(cfg: RunConfig):
    spec = cfg.spec()
    n = cfg.n or 0
    triple = bound_triple(QuantumNumbers(n, spec.l, spec.d), spec.a, spec.b, cfg.digits)
    row = dict(n=n, l=spec.l, d=spec.d, a=str(spec.a), b=str(spec.b),
               lower=fmt(triple.lower, cfg.digits), estimate=fmt(triple.estimate, cfg.digits),
               upper=fmt(triple.upper, cfg.digits),
               upper_valid=bool(big(spec.a) >= 0), uncertainty="", status="ok")
    try:
        row["uncertainty"] = fmt(uncertainty_lower_bound(spec, cfg.digits), cfg.digits)
    except UnboundedBelowError as exc:
        row["status"] = f"error: {exc}"
        return [row], EXIT_NUMERIC
    return [row], EXIT_OK


def cmd_fig1(cfg: RunConfig):
    if cfg.a is None or cfg.b is None:
        raise UsageError("--a and --b are required")
    nmax, lmax = cfg.extra["nmax"], cfg.extra["lmax"]
    if nmax < 0 or lmax < 0:
        raise UsageError("--nmax and --lmax must be >= 0")
    curve = fig1_curve(cfg.a, cfg.b, cfg.d, range(nmax + 1), lmax, cfg.digits)
    return [dict(n=n, l=l, E=fmt(E, cfg.digits)) for n, l, E in curve], EXIT_OK


def load_reference(table: str | None = None) -> list:
    """Rows of the embedded reference tables (all values kept as strings)."""
    text = resources.files("aimspectra").joinpath("data/reference_tables.csv").read_text()
    rows = list(csv.DictReader(io.StringIO(text)))
    return [r for r in rows if table is None or r["table"] == table]


def significant_match(E, ref: str, sig: int = 18) -> bool:
    """``|E - ref| <= 10^(floor(log10|ref|) - sig + 1)``."""
    with working_precision(60):
        r = big(ref)
        if r == 0:
            return abs(big(E)) <= big(10) ** (-sig)
        exp10 = int(math.floor(math.log10(abs(float(r)))))
        return abs(big(E) - r) <= big(10) ** (exp10 - sig + 1)


def reproduce_table(table: str, digits: int = DEFAULT_DIGITS) -> list:
    """Recompute every reference entry; one result dict per row."""
    refs = load_reference(table)
    if not refs:
        raise UsageError(f"unknown table {table!r}")
    groups: dict = {}
    for r in refs:
        key = (r["d"], r["l"], r["a"], r["b"], r["R"])
        groups[key] = max(groups.get(key, 0), int(r["n"]) + 1)
    cache = {}
    for key, count in sorted(groups.items()):
        d, l, a, b, R = key
        spec = ProblemSpec(a, b, int(d), int(l), parse_radius(R))
        cache[key] = spectrum(spec, count, digits=digits)
    out = []
    for r in refs:
        res = cache[(r["d"], r["l"], r["a"], r["b"], r["R"])][int(r["n"])]
        ok = significant_match(res.E, r["E"])
        out.append(dict(table=table, n=int(r["n"]), l=int(r["l"]), d=int(r["d"]), a=r["a"], b=r["b"],
                        R=r["R"], E=fmt_energy(res), E_ref=r["E"], N=res.iterations, N_ref=int(r["N"]),
                        residual=fmt_residual(res.residual), status="match" if ok else "mismatch"))
    return out


def cmd_table(cfg: RunConfig):
    rows = reproduce_table(cfg.extra["reproduce"], cfg.digits)
    return rows, EXIT_OK if all(r["status"] == "match" for r in rows) else EXIT_NUMERIC


COMMANDS = {"solve": cmd_solve, "exact": cmd_exact, "bounds": cmd_bounds, "table": cmd_table, "fig1": cmd_fig1}


# plumbing --------------------------------------------------------------------

def render(rows: list, fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(rows, indent=1, sort_keys=False) + "\n"
    buf = io.StringIO()
    if not rows:
        return ""
    fieldnames = list(rows[0])
    for r in rows[1:]:
        fieldnames += [k for k in r if k not in fieldnames]
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (";".join(v) if isinstance(v, list) else v) for k, v in r.items()})
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", help="Coulomb coupling")
    common.add_argument("--b", help="oscillator coupling (> 0)")
    common.add_argument("--d", type=int, default=3, help="dimension (>= 2)")
    common.add_argument("--l", type=int, default=0, help="angular momentum")
    common.add_argument("--R", default="inf", help="box radius or 'inf'")
    common.add_argument("--n", type=int, help="level index / polynomial degree")
    common.add_argument("--digits", type=int, default=DEFAULT_DIGITS)
    common.add_argument("--r0", help="AIM expansion point")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", help="output path (default stdout)")

    parser = _Parser(prog="aimspectra", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("solve", parents=[common], help="eigenvalues by AIM")
    p.add_argument("--count", type=int)
    p = sub.add_parser("exact", parents=[common], help="quasi-exact solutions")
    p.add_argument("action", choices=["check", "family", "solution"])
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--free", dest="kind", action="store_const", const="free")
    g.add_argument("--confined", dest="kind", action="store_const", const="confined")
    p.add_argument("--k", type=int, help="k = d + 2l (family only)")
    p.add_argument("--branch", choices=["+", "-"], help="n = 1 confined family branch")
    sub.add_parser("bounds", parents=[common], help="energy bounds")
    p = sub.add_parser("table", parents=[common], help="reproduce a reference table")
    p.add_argument("--reproduce", choices=["II", "III"], required=True)
    p = sub.add_parser("fig1", parents=[common], help="sum-approximation curves")
    p.add_argument("--nmax", type=int, default=2)
    p.add_argument("--lmax", type=int, default=10)
    return parser


def make_config(ns: argparse.Namespace) -> RunConfig:
    try:
        R = parse_radius(ns.R)
    except ValueError as exc:
        raise UsageError(f"bad --R value {ns.R!r}") from exc
    extra = {k: getattr(ns, k) for k in ("action", "kind", "k", "branch", "reproduce", "nmax", "lmax")
             if hasattr(ns, k)}
    return RunConfig(ns.command, ns.a, ns.b, ns.d, ns.l, R, ns.n, getattr(ns, "count", None),
                     ns.digits, ns.r0, ns.format, ns.out, extra)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error already reported by argparse
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = make_config(ns)
        rows, code = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"aimspectra: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AimSpectraError as exc:
        print(f"aimspectra: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = render(rows, cfg.format)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
