"""Certified checking of bounds on the step functions theta(x) and pi(x).

Both functions are constant on every [p_k, p_{k+1}).  For each bound used
here the margin ``bound(x) - quantity`` is, at fixed step level, either
monotone in x or concave in x on the stated domain, so its infimum over a
constancy interval is attained at one of the two ends: at x = p_k (level just
after the jump) or in the limit x -> p_{k+1}^- (same level, larger x).  Those
two one-sided points per prime are the *breakpoints*.  Where a margin is not
concave (``dense_below``) a 1/256 grid is checked as well.

Margins are evaluated in float64 with a rigorous envelope (fixed-point theta
error plus a generous rounding allowance).  Any point whose float margin does
not clear its envelope is re-evaluated in mpmath with exact levels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from types import SimpleNamespace
from typing import Callable

import numpy as np
from mpmath import mp, mpf

from .errors import DomainError
from .primes import (THETA_SCALE, PrimeEngine, default_engine, log_fixed,
                     lucy_pi, map_ordered, partition, theta_fixed_between,
                     theta_fixed_error)
from .reports import InequalityReport

NP = SimpleNamespace(log=np.log, sqrt=np.sqrt, abs=np.abs, c=float)
MP = SimpleNamespace(log=mp.log, sqrt=mp.sqrt, abs=abs, c=mpf)
EPS = 2.0**-52
ROUNDING_ULPS = 256


@dataclass(frozen=True)
class StepBound:
    name: str
    kind: str  # "theta" or "pi"
    margin: Callable  # margin(x, level, lib) > 0  <=>  the inequality holds
    lo_min: float
    lo_strict: bool = False
    hi_max: float | None = None
    dense_below: float = 0.0
    domain: str = ""

    def check_domain(self, lo: float, hi: float, include_hi: bool) -> None:
        bad_lo = lo <= self.lo_min if self.lo_strict else lo < self.lo_min
        if bad_lo:
            raise DomainError(f"{self.name}: requires x {'>' if self.lo_strict else '>='} "
                              f"{self.lo_min} ({self.domain}); got lo={lo}")
        if self.hi_max is not None and (hi > self.hi_max or (hi == self.hi_max and include_hi)):
            raise DomainError(f"{self.name}: requires x < {self.hi_max:g} ({self.domain}); got hi={hi}"
                              + (" with the endpoint included" if hi == self.hi_max else ""))


@dataclass
class _Acc:
    margin: float = math.inf
    x: float = math.nan
    side: str = "at"
    level_n: int = 0
    count: int = 0
    escalated: int = 0
    failures: int = 0
    first_failure: tuple | None = None

    def take(self, margins, xs, sides, levels_n, exact_fail):
        if len(margins) == 0:
            return
        self.count += len(margins)
        i = int(np.argmin(margins))
        if margins[i] < self.margin:
            self.margin = float(margins[i])
            self.x = float(xs[i])
            self.side = sides[i] if isinstance(sides, (list, np.ndarray)) else sides
            self.level_n = int(levels_n[i])
        for item in exact_fail:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = item

    def merge(self, other: "_Acc") -> None:
        if other.margin < self.margin:
            self.margin, self.x, self.side, self.level_n = other.margin, other.x, other.side, other.level_n
        self.count += other.count
        self.escalated += other.escalated
        self.failures += other.failures
        if self.first_failure is None:
            self.first_failure = other.first_failure


def _exact_level(engine: PrimeEngine, kind: str, n: int, precision: int):
    if kind == "pi":
        return mpf(engine.pi(n))
    if n < 2:
        return mpf(0)
    return engine.theta_exact(n, precision)


def _evaluate(bound: StepBound, acc: _Acc, engine, precision, xs, levels, levels_n, sides, err):
    """Float margins for one batch; escalate the uncertain ones."""
    xf = xs.astype(np.float64)
    with np.errstate(all="ignore"):
        m = bound.margin(xf, levels, NP)
    env = err + ROUNDING_ULPS * EPS * (np.abs(xf) + np.abs(levels) + np.abs(m))
    unsure = np.flatnonzero(~(m > env))
    fails = []
    for j in unsure.tolist():
        acc.escalated += 1
        with mp.workdps(precision):
            lev = _exact_level(engine, bound.kind, int(levels_n[j]), precision)
            xm = mpf(int(xs[j])) if float(xs[j]).is_integer() else mpf(float(xs[j]))
            mm = bound.margin(xm, lev, MP)
        m[j] = float(mm)
        if not mm > 0:
            side = sides[j] if isinstance(sides, (list, np.ndarray)) else sides
            fails.append((float(xs[j]), side, str(mm)))
    acc.take(m, xs, sides, levels_n, fails)


def _scan_window(bounds, engine, kind, a, b, pi0, fx0, include_hi_prime, precision, left_mode, lo_int):
    """Breakpoints of every prime p with a <= p < b; prefix levels given."""
    accs = [_Acc() for _ in bounds]
    for blk in engine.blocks(a, b):
        ps = blk.primes
        k = len(ps)
        if k == 0:
            continue
        if kind == "theta":
            fx = log_fixed(ps)
            after_fx = fx0 + np.cumsum(fx)
            after = after_fx.astype(np.float64) / THETA_SCALE
            before = (after_fx - fx).astype(np.float64) / THETA_SCALE
            fx0 = int(after_fx[-1])
            err = theta_fixed_error(pi0 + k, float(ps[-1]))
            pi0 += k
        else:
            after_i = pi0 + np.arange(1, k + 1, dtype=np.int64)
            after = after_i.astype(np.float64)
            before = after - 1.0
            pi0 += k
            err = 0.0
        cols = []  # (x, level, level_n, side) per checkpoint family, interleaved per prime
        if left_mode in ("integer", "both"):
            cols.append((ps - 1, before, ps - 1, "at"))
        if left_mode in ("limit", "both"):
            cols.append((ps, before, ps - 1, "left"))
        cols.append((ps, after, ps, "at"))
        w = len(cols)
        xs = np.empty(w * k, dtype=np.int64)
        levels = np.empty(w * k)
        levels_n = np.empty(w * k, dtype=np.int64)
        sides = np.empty(w * k, dtype=object)
        for c, (cx, cl, cn, cs) in enumerate(cols):
            xs[c::w], levels[c::w], levels_n[c::w], sides[c::w] = cx, cl, cn, cs
        keep = xs >= lo_int
        if include_hi_prime is not None and ps[-1] == include_hi_prime:
            keep[-1] = False
        if not keep.all():
            xs, levels, levels_n, sides = xs[keep], levels[keep], levels_n[keep], sides[keep]
        for bd, acc in zip(bounds, accs):
            _evaluate(bd, acc, engine, precision, xs, levels, levels_n, sides, err)
    return accs, pi0, fx0


def _window_prefix(engine, a, b):
    return theta_fixed_between(engine, a, b)


def check_step_bounds(bounds, lo, hi, *, engine: PrimeEngine | None = None, precision: int = 30,
                      include_hi: bool = True, parts: int = 1, jobs: int = 1,
                      partial: bool = False, left_mode: str = "both") -> dict[str, InequalityReport]:
    """Check every bound in ``bounds`` (all of one kind) at all breakpoints of [lo, hi].

    Before each prime p the step level is checked at the integer p - 1
    (``left_mode="integer"``), in the limit x -> p^- (``"limit"``), or both.
    """
    if left_mode not in ("both", "integer", "limit"):
        raise ValueError(f"unknown left_mode {left_mode!r}")
    engine = engine or default_engine()
    kinds = {bd.kind for bd in bounds}
    if len(kinds) != 1:
        raise ValueError("bounds must share one step function")
    kind = kinds.pop()
    if not hi >= lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    for bd in bounds:
        bd.check_domain(lo, hi, include_hi)
    a0, b0 = math.floor(lo), math.floor(hi)
    hi_is_int = float(hi).is_integer()
    drop_prime = b0 if (hi_is_int and not include_hi) else None

    # prefix levels at lo
    pi_lo = lucy_pi(a0)
    fx_lo = engine.theta_fixed(a0) if kind == "theta" else 0

    windows = partition(a0 + 1, b0 + 1, parts) if b0 > a0 else []
    pis, fxs = [], []
    if windows:
        pis.append(pi_lo)
        fxs.append(fx_lo)
        if len(windows) > 1:
            if kind == "theta":
                sums = map_ordered(_window_prefix, [(engine, wa, wb) for wa, wb in windows[:-1]], jobs)
            else:
                sums = [(lucy_pi(wb - 1) - lucy_pi(wa - 1), 0) for wa, wb in windows[:-1]]
            for c, s in sums:
                pis.append(pis[-1] + c)
                fxs.append(fxs[-1] + s)
    args = [(bounds, engine, kind, wa, wb, p0, f0, drop_prime, precision, left_mode, math.ceil(lo))
            for (wa, wb), p0, f0 in zip(windows, pis, fxs)]
    results = map_ordered(_scan_window, args, jobs)

    accs = [_Acc() for _ in bounds]
    level_lo = fx_lo / THETA_SCALE if kind == "theta" else float(pi_lo)
    err_lo = theta_fixed_error(pi_lo, max(lo, 2.0)) if kind == "theta" else 0.0
    start = np.array([lo], dtype=np.float64)
    for bd, acc in zip(bounds, accs):
        _evaluate(bd, acc, engine, precision, start, np.array([level_lo]),
                  np.array([a0]), "at", err_lo)
    for res, _, _ in results:
        for acc, r in zip(accs, res):
            acc.merge(r)

    # right end: x = hi at level floor(hi), unless that point already is a prime breakpoint
    hi_is_prime = hi_is_int and b0 >= 2 and engine.pi(b0) != engine.pi(b0 - 1)
    if hi > lo and not (hi_is_prime and include_hi):
        pi_hi = lucy_pi(b0)
        if kind == "theta":
            fx_hi = results[-1][2] if windows else fx_lo
            level_hi, err_hi = fx_hi / THETA_SCALE, theta_fixed_error(pi_hi, hi)
        else:
            level_hi, err_hi = float(pi_hi), 0.0
        side = "at" if include_hi else "left"
        for bd, acc in zip(bounds, accs):
            _evaluate(bd, acc, engine, precision, np.array([float(hi)]), np.array([level_hi]),
                      np.array([b0]), side, err_hi)

    # non-concave stretch near the origin
    for bd, acc in zip(bounds, accs):
        top = min(hi, bd.dense_below)
        if top > lo:
            grid = np.arange(math.ceil(lo * 256), math.floor(top * 256) + 1) / 256.0
            ns = np.floor(grid).astype(np.int64)
            table = _small_levels(engine, kind, int(ns.max()))
            _evaluate(bd, acc, engine, precision, grid, table[ns], ns, "at",
                      1e-12 if kind == "theta" else 0.0)

    reports = {}
    for bd, acc in zip(bounds, accs):
        reports[bd.name] = _finish(bd, acc, engine, kind, lo, hi, precision, partial,
                                   include_hi, left_mode)
    return reports


def _small_levels(engine, kind, n):
    ps = engine.primes_upto(max(n, 2))
    table = np.zeros(n + 1)
    inc = np.zeros(n + 1)
    inc[ps[ps <= n]] = np.log(ps[ps <= n].astype(np.float64)) if kind == "theta" else 1.0
    table[:] = np.cumsum(inc)
    return table


def _finish(bd, acc, engine, kind, lo, hi, precision, partial, include_hi, left_mode):
    worst = None
    err = 0.0
    if math.isfinite(acc.margin):
        n = acc.level_n
        with mp.workdps(precision):
            if kind == "pi":
                lev = mpf(engine.pi(n))
            elif n <= 10**7:
                lev = engine.theta_exact(max(n, 2), precision) if n >= 2 else mpf(0)
            else:
                lev = mpf(engine.theta_fixed(n)) / THETA_SCALE
                err = theta_fixed_error(engine.pi(n), n)
            x = acc.x
            xm = mpf(int(x)) if float(x).is_integer() else mpf(x)
            worst = bd.margin(xm, lev, MP)
    holds = acc.failures == 0 and worst is not None and worst > err
    witness = int(acc.x) if float(acc.x).is_integer() else acc.x
    details = {"domain": bd.domain, "include_hi": include_hi, "left_mode": left_mode,
               "margin_error_bound": err}
    if acc.first_failure is not None:
        details["first_failure"] = list(acc.first_failure)
        details["failures"] = acc.failures
    return InequalityReport(bd.name, lo, hi, holds, worst, witness, acc.count,
                            witness_side=acc.side, partial=partial, escalated=acc.escalated,
                            details=details)


def breakpoints(lo: float, hi: float, engine: PrimeEngine | None = None,
                include_hi: bool = True, left_mode: str = "limit") -> list[tuple[float, str]]:
    """Ordered checkpoints of [lo, hi]: (x, "at") or (x, "left") for x -> x^-."""
    engine = engine or default_engine()
    a0, b0 = math.floor(lo), math.floor(hi)
    out: list[tuple[float, str]] = [(lo, "at")]
    ps = engine.primes_between(a0 + 1, b0 + 1) if b0 > a0 else np.zeros(0, dtype=np.int64)
    for p in ps.tolist():
        if left_mode in ("integer", "both") and p - 1 >= lo and (p - 1, "at") != out[-1]:
            out.append((p - 1, "at"))
        if left_mode in ("limit", "both"):
            out.append((p, "left"))
        if p != hi or include_hi:
            out.append((p, "at"))
    hi_is_prime = len(ps) and ps[-1] == hi
    if hi > lo and not hi_is_prime:
        out.append((hi, "at" if include_hi else "left"))
    return out
