"""Command line entry point: ``prime-gate <command> [options]``.

Exit codes: 0 success / inequality holds, 1 inequality fails, 2 usage or
domain error, 3 capacity or precision error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import mpmath

from . import highprec, integrals, pi_bounds, scanner, splitting, theta_bounds
from .errors import CapacityError, DomainError, PrecisionError
from .primes import DEFAULT_SIEVE_LIMIT, PrimeEngine, default_cache_path
from .reports import InequalityReport
from .widereal import MIN_PRECISION

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


@dataclass
class RunConfig:
    precision: int = 30
    sieve_limit: int = DEFAULT_SIEVE_LIMIT
    cache_path: str | None = None
    jobs: int = 1
    output: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.precision < MIN_PRECISION:
            raise DomainError(f"--precision must be >= {MIN_PRECISION}")
        if self.jobs < 1:
            raise DomainError("--jobs must be >= 1")
        if self.format not in ("json", "csv"):
            raise DomainError("--format must be json or csv")

    def engine(self) -> PrimeEngine:
        return PrimeEngine(sieve_limit=self.sieve_limit, cache_path=self.cache_path or default_cache_path())


def parse_number(text: str):
    """Integers, floats, ``1e8``, ``exp(22)`` / ``e^22``; integral values come back as int."""
    s = text.strip().lower().replace("_", "")
    try:
        if s.startswith("exp(") and s.endswith(")"):
            v = math.exp(float(s[4:-1]))
        elif s.startswith("e^"):
            v = math.exp(float(s[2:]))
        elif s.isdigit():
            return int(s)
        else:
            v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return int(v) if v.is_integer() else v


# --- verify ----------------------------------------------------------------

THETA_TARGETS = {
    "prop1.1": ("P1_1", 2, 1e8),
    "prop1.2": ("P1_2", 2, 1e8),
    "prop1.3": ("P1_3", 758711, 1e8),
    "prop1.4": ("P1_4", theta_bounds.E22, theta_bounds.E22 + 1e7),
    "prop1.5": ("P1_5", 2, 1e8),
    "lemma1.lower": ("LEMMA1_LOWER", 6400, 1e8),
    "lemma1.upper": ("LEMMA1_UPPER", 6400, 1e8),
}
OTHER_TARGETS = ("lemma1", "thm1", "H", "beta", "h1", "h2", "integral", "cubic", "dominance")
TARGETS = tuple(THETA_TARGETS) + OTHER_TARGETS


def run_verify(target: str, lo, hi, cfg: RunConfig, *, real_limits: bool = False,
               endpoint: str = "auto") -> list[InequalityReport]:
    eng = cfg.engine()
    p = cfg.precision
    if target in THETA_TARGETS:
        item, d_lo, d_hi = THETA_TARGETS[target]
        lo = d_lo if lo is None else lo
        hi = d_hi if hi is None else hi
        inc = {"auto": None, "include": True, "exclude": False}[endpoint]
        partial = target == "prop1.4"
        return [theta_bounds.check_theta_bound(item, lo, hi, p, engine=eng, parts=cfg.jobs, jobs=cfg.jobs,
                                               include_endpoint=inc, partial=partial)]
    if target == "lemma1":
        reps = theta_bounds.check_theta_bounds(["LEMMA1_LOWER", "LEMMA1_UPPER"], lo or 6400, hi or 1e8, p,
                                               engine=eng, parts=cfg.jobs, jobs=cfg.jobs)
        return list(reps.values())
    if target == "thm1":
        return [pi_bounds.check_thm1(lo or 59, hi or 1e8, p, real_limits=real_limits, engine=eng,
                                     parts=cfg.jobs, jobs=cfg.jobs)]
    if target == "H":
        return [pi_bounds.check_H_at_primes(hi or pi_bounds.E11, p, engine=eng)]
    if target == "beta":
        return [pi_bounds.check_beta_below_6400(p, engine=eng)]
    if target == "h1":
        return [integrals.h1_sign_check(p)]
    if target == "h2":
        return [integrals.h2_sign_check(p)]
    if target == "integral":
        return [integrals.check_integral_budget(precision=p)]
    if target == "cubic":
        return [pi_bounds.cubic_predicate_check()]
    if target == "dominance":
        return [splitting.dominance_check()]
    raise DomainError(f"unknown target {target!r}")


# --- output helpers --------------------------------------------------------

def _emit(cfg: RunConfig, payload, csv_text: str | None = None) -> None:
    if cfg.output is None:
        return
    if cfg.format == "csv":
        if csv_text is None:
            raise DomainError("this command has no CSV form; use --format json")
        text = csv_text
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if cfg.output == "-":
        sys.stdout.write(text)
    else:
        Path(cfg.output).write_text(text)


def _reports_csv(reports: list[InequalityReport]) -> str:
    lines = ["name,lo,hi,holds,worst_margin,witness,witness_side,points_checked"]
    for r in reports:
        d = r.to_dict()
        lines.append(",".join(str(v) for v in (d["name"], d["range"][0], d["range"][1], d["holds"],
                                                  d["worst_margin"], d["witness"], d["witness_side"],
                                                  d["points_checked"])))
    return "\n".join(lines) + "\n"


# --- commands --------------------------------------------------------------

def cmd_verify(args, cfg: RunConfig) -> int:
    reports = run_verify(args.target, args.lo, args.hi, cfg, real_limits=args.real_limits,
                         endpoint=args.endpoint)
    for r in reports:
        print(r.summary())
    _emit(cfg, [r.to_dict() for r in reports], _reports_csv(reports))
    return EXIT_OK if all(r.holds for r in reports) else EXIT_FAIL


def cmd_table(args, cfg: RunConfig) -> int:
    rows = highprec.table_emit(precision=max(cfg.precision, 60), model=args.model, jobs=cfg.jobs)
    ok = True
    print(f"{'t':>11}  {'G(e^t)':>16}  {'reference':>16}  rel.err")
    for r in rows:
        err = mpmath.nstr(r.rel_err, 2) if r.rel_err is not None else "-"
        print(f"{r.t:>11}  {r.rendered:>16}  {r.reference or '-':>16}  {err}")
        ok &= r.within_tol is not False
    csv_text = "t,G,log_neg_g\n" + "".join(
        f"{r.t},{r.rendered},{mpmath.nstr(r.value.log_neg_g, 17)}\n" for r in rows)
    _emit(cfg, [r.to_dict() for r in rows], csv_text)
    print(f"{sum(bool(r.within_tol) for r in rows)}/{len(rows)} rows within {highprec.TABLE_REL_TOL:g}"
          f" ({args.model} model)")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_plotdata(args, cfg: RunConfig) -> int:
    if args.steps < 2:
        raise DomainError("--steps must be at least 2")
    rows = highprec.plot_rows(args.t_lo, args.t_hi, args.steps, max(cfg.precision, 60), args.model, cfg.jobs)
    text = highprec.plot_csv(rows)
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        _emit(cfg, [{"t": mpmath.nstr(r.t, 17), "log_neg_g": mpmath.nstr(r.log_neg_g, 17)} for r in rows], text)
    return EXIT_OK


def cmd_scan(args, cfg: RunConfig) -> int:
    eng = cfg.engine()
    res = scanner.scan_exhaustive(args.lo, args.hi, engine=eng, parts=args.parts or cfg.jobs, jobs=cfg.jobs,
                                  precision=max(cfg.precision, scanner.RECHECK_PRECISION),
                                  checkpoint=args.checkpoint)
    print(f"scanned [{res.lo}, {res.hi}]: {len(res.violations)} violation runs, "
          f"{res.violation_count} integers, largest {res.largest_violation}, "
          f"{res.points_rechecked_at_high_precision} rechecked at high precision")
    _emit(cfg, res.to_dict(), res.to_csv())
    return EXIT_OK


def cmd_check(args, cfg: RunConfig) -> int:
    cert = scanner.check_point(args.x, max(cfg.precision, 60), engine=cfg.engine())
    d = cert.to_dict()
    print(f"x = {cert.x}: pi(x) = {cert.pi_x}, pi(floor(x/e)) = pi({cert.floor_x_over_e}) = {cert.pi_x_over_e}")
    print(f"G(x) = {d['G']} (+/- {d['error_bound']}) -> {cert.status}")
    _emit(cfg, d)
    return EXIT_OK


def cmd_optimize(args, cfg: RunConfig) -> int:
    prec = max(cfg.precision, 60)
    res = splitting.optimize_a(args.lo, args.hi, args.tol, args.mode, prec)
    ref, chain = splitting.derive_x0(prec)
    s = lambda v: mpmath.nstr(v, 12)
    print(f"{'':14}{'optimum':>20}{'a = 1.359':>20}")
    print(f"{'a':14}{s(res.a_star):>20}{s(ref.a):>20}")
    print(f"{'log x0':14}{s(res.thresholds.log_x0):>20}{s(ref.log_x0):>20}")
    print(f"{'selector':14}{res.thresholds.selector:>20}{ref.selector:>20}")
    if not res.attained:
        print(f"infimum {s(res.infimum_log_x0)} at a = e/2 is not attained in {args.mode} mode")
    print(f"grid oracle: a = {res.grid_a:.9f}, log x0 = {res.grid_log_x0:.9f}")
    _emit(cfg, {"optimum": res.to_dict(), "reference": ref.to_dict(), "certificate": chain})
    return EXIT_OK


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=30, help="decimal digits (>= 30)")
    common.add_argument("--sieve-limit", type=parse_number, default=DEFAULT_SIEVE_LIMIT)
    common.add_argument("--cache-path", default=None, help="base-prime cache (env PRIME_GATE_CACHE)")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--output", "-o", default=None, help="report file, '-' for stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="report format (default json; csv for plotdata)")

    p = argparse.ArgumentParser(prog="prime-gate", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="check a named inequality")
    v.add_argument("target", choices=TARGETS)
    v.add_argument("--from", dest="lo", type=parse_number, default=None)
    v.add_argument("--to", dest="hi", type=parse_number, default=None)
    v.add_argument("--real-limits", action="store_true", help="thm1: check left limits p^- instead of p - 1")
    v.add_argument("--endpoint", choices=("auto", "include", "exclude"), default="auto")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("table", parents=[common], help="G(e^t) on the reference grid")
    t.add_argument("--model", choices=highprec.MODELS, default=highprec.DEFAULT_MODEL)
    t.set_defaults(func=cmd_table)

    pd = sub.add_parser("plotdata", parents=[common], help="CSV of log(-G(e^t)) on a t grid")
    pd.add_argument("--t-lo", default="43")
    pd.add_argument("--t-hi", default="3159")
    pd.add_argument("--steps", type=int, default=1000)
    pd.add_argument("--model", choices=highprec.MODELS, default=highprec.DEFAULT_MODEL)
    pd.set_defaults(func=cmd_plotdata)

    s = sub.add_parser("scan", parents=[common], help="all integers with G(x) >= 0 in a range")
    s.add_argument("--from", dest="lo", type=parse_number, default=2)
    s.add_argument("--to", dest="hi", type=parse_number, required=True)
    s.add_argument("--parts", type=int, default=None)
    s.add_argument("--checkpoint", default=None, help="resumable state file")
    s.set_defaults(func=cmd_scan)

    c = sub.add_parser("check", parents=[common], help="certified sign of G at one integer")
    c.add_argument("x", type=parse_number)
    c.set_defaults(func=cmd_check)

    o = sub.add_parser("optimize", parents=[common], help="minimise x0 over the splitting constant")
    o.add_argument("--mode", choices=splitting.MODES, default="inclusive")
    o.add_argument("--lo", type=float, default=1.0)
    o.add_argument("--hi", type=float, default=None)
    o.add_argument("--tol", type=float, default=1e-9)
    o.set_defaults(func=cmd_optimize)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        fmt = args.format or ("csv" if args.command == "plotdata" else "json")
        cfg = RunConfig(args.precision, int(args.sieve_limit), args.cache_path, args.jobs, args.output, fmt)
        return args.func(args, cfg)
    except (DomainError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, PrecisionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
