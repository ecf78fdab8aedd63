"""Explicit two-sided estimate for pi(x) and the finite checks behind it.

    x / (log x - 1 + log^-1/2 x) < pi(x) < x / (log x - 1 - log^-1/2 x),  x >= 59

plus the scaling inequality pi(a x) < a pi(x) and the subadditivity
inequality pi(x + y) < pi(x) + pi(y), both sampled on exact counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import mpmath
from mpmath import mp, mpf

from .errors import CapacityError, DomainError
from .primes import PrimeEngine, default_engine, lucy_pi
from .reports import InequalityReport
from .stepcheck import StepBound, check_step_bounds

E11 = math.exp(11)


@dataclass(frozen=True)
class BoundFormula:
    kind: str  # "LOWER" or "UPPER"

    @property
    def min_x(self) -> float:
        return 59.0 if self.kind == "LOWER" else 6.0

    def __call__(self, x, precision: int = 30):
        if x < self.min_x:
            raise DomainError(f"{self.kind} bound needs x >= {self.min_x:g}, got {x}")
        with mp.workdps(precision):
            x = mpf(x)
            L = mp.log(x)
            s = 1 / mp.sqrt(L)
            return x / (L - 1 + s) if self.kind == "LOWER" else x / (L - 1 - s)


LOWER = BoundFormula("LOWER")
UPPER = BoundFormula("UPPER")


def pi_lower(x, precision: int = 30):
    return LOWER(x, precision)


def pi_upper(x, precision: int = 30):
    return UPPER(x, precision)


def _thm_lower(x, n, lib):
    L = lib.log(x)
    return n - x / (L - 1 + 1 / lib.sqrt(L))


def _thm_upper(x, n, lib):
    L = lib.log(x)
    return x / (L - 1 - 1 / lib.sqrt(L)) - n


THM1_LOWER = StepBound("THM1_LOWER", "pi", _thm_lower, 59.0,
                       domain="pi(x) > x/(log x - 1 + log^-0.5 x) for x >= 59")
THM1_UPPER = StepBound("THM1_UPPER", "pi", _thm_upper, 59.0,
                       domain="pi(x) < x/(log x - 1 - log^-0.5 x) for x >= 59")


def check_thm1(lo: float, hi: float, precision: int = 30, *, real_limits: bool = False,
               engine: PrimeEngine | None = None, parts: int = 1, jobs: int = 1) -> InequalityReport:
    """Both halves of the pi(x) sandwich at every breakpoint of [lo, hi].

    By default the checkpoints are the integers p and p - 1 around each prime
    (integer x).  ``real_limits=True`` replaces p - 1 by the limit x -> p^-,
    which covers every real x; the lower bound then fails on (66.2793..., 67).
    """
    reps = check_step_bounds([THM1_LOWER, THM1_UPPER], lo, hi, engine=engine,
                             precision=precision, parts=parts, jobs=jobs,
                             left_mode="limit" if real_limits else "integer")
    low, up = reps["THM1_LOWER"], reps["THM1_UPPER"]
    worst = low if low.worst_margin <= up.worst_margin else up
    return InequalityReport(
        "THM1_REAL" if real_limits else "THM1", lo, hi, low.holds and up.holds, worst.worst_margin, worst.witness,
        low.points_checked, witness_side=worst.witness_side, escalated=low.escalated + up.escalated,
        details={"lower": low.to_dict(), "upper": up.to_dict()},
    )


# --- H and beta ------------------------------------------------------------

def _pi_exact(x, engine) -> int:
    return (engine or default_engine()).pi(int(mp.floor(x)))


def H(x, precision: int = 30, engine: PrimeEngine | None = None):
    """x/pi(x) + 1 + log^-1/2 x - log x with the exact count."""
    if x < 7:
        raise DomainError(f"H needs x >= 7, got {x}")
    with mp.workdps(precision):
        x = mpf(x)
        L = mp.log(x)
        return x / _pi_exact(x, engine) + 1 + 1 / mp.sqrt(L) - L


def beta(x, precision: int = 30, engine: PrimeEngine | None = None, *, check_domain: bool = True):
    """-x/pi(x) + log x - 1 + log^-1/2 x with the exact count."""
    if check_domain and not 59 <= x < 6400:
        raise DomainError(f"beta is examined on 59 <= x < 6400, got {x}")
    with mp.workdps(precision):
        x = mpf(x)
        L = mp.log(x)
        return -x / _pi_exact(x, engine) + L - 1 + 1 / mp.sqrt(L)


def _argmin(vals):
    i = min(range(len(vals)), key=lambda k: vals[k])
    return i, vals[i]


def check_H_at_primes(limit: float = E11, precision: int = 30,
                      engine: PrimeEngine | None = None) -> InequalityReport:
    """H(p_n) > 0 and p_n/n - log p_n > -1.3 for every prime 7 <= p_n <= limit."""
    engine = engine or default_engine()
    if limit > engine.sieve_limit:
        raise CapacityError(f"limit {limit} above sieve limit")
    ps = engine.primes_upto(int(math.floor(limit))).tolist()
    h_vals, red_vals, xs = [], [], []
    with mp.workdps(precision):
        for n, p in enumerate(ps, start=1):
            if p < 7:
                continue
            L = mp.log(p)
            h_vals.append(mpf(p) / n + 1 + 1 / mp.sqrt(L) - L)
            red_vals.append(mpf(p) / n - L + mpf("1.3"))
            xs.append(p)
    ih, hmin = _argmin(h_vals)
    ir, rmin = _argmin(red_vals)
    return InequalityReport(
        "H_AT_PRIMES", 7, limit, hmin > 0 and rmin > 0, hmin, xs[ih], len(xs),
        details={"reduced_form": "p_n/n - log p_n > -1.3",
                 "reduced_worst_margin": rmin, "reduced_witness": xs[ir],
                 "largest_prime": xs[-1]},
    )


def check_beta_below_6400(precision: int = 30, engine: PrimeEngine | None = None) -> InequalityReport:
    """beta(p_n - 1) > 0 for primes with 59 <= p_n - 1 < 6400.

    Also evaluates the left limit x -> p_n^- (where beta is smallest on the
    constancy interval) and two reduced forms of the check with
    log^-1/2(p_n - 1) > 0.337 substituted:

    * as printed:  log(p-1)/(p-1) - (p-1)/(n-1) > 0.663
    * as needed:   log(p-1)       - (p-1)/(n-1) > 0.663
    """
    engine = engine or default_engine()
    ps = engine.primes_upto(6400).tolist()
    direct, left, xs = [], [], []
    printed_true, needed_true = [], []
    with mp.workdps(precision):
        for n, p in enumerate(ps, start=1):
            x = p - 1
            if x < 59 or x >= 6400:
                continue
            Lx = mp.log(x)
            direct.append(-mpf(x) / (n - 1) + Lx - 1 + 1 / mp.sqrt(Lx))
            Lp = mp.log(p)
            left.append(-mpf(p) / (n - 1) + Lp - 1 + 1 / mp.sqrt(Lp))
            xs.append(x)
            if Lx / x - mpf(x) / (n - 1) > mpf("0.663"):
                printed_true.append(n)
            if Lx - mpf(x) / (n - 1) > mpf("0.663"):
                needed_true.append(n)
        floor_ok = all(1 / mp.sqrt(mp.log(x)) > mpf("0.337") for x in xs)
    ns = [n for n, p in enumerate(ps, start=1) if 59 <= p - 1 < 6400]
    threshold = None
    for k in range(len(ns)):
        if all(n in set(needed_true) for n in ns[k:]):
            threshold = ns[k]
            break
    i, dmin = _argmin(direct)
    j, lmin = _argmin(left)
    return InequalityReport(
        "BETA_BELOW_6400", 59, 6400, dmin > 0, dmin, xs[i], len(xs),
        details={
            "left_limit_worst_margin": lmin, "left_limit_witness": xs[j] + 1,
            "left_limit_holds": lmin > 0,
            "inv_sqrt_log_above_0.337": floor_ok,
            "printed_form_truth_set": printed_true,
            "printed_form_matches_n_ge_36": printed_true == [n for n in ns if n >= 36],
            "reduced_form_n_threshold": threshold,
        },
    )


# --- scaling and subadditivity ---------------------------------------------

def _counts_at(sorted_primes: np.ndarray, xs: np.ndarray) -> np.ndarray:
    return np.searchsorted(sorted_primes, xs, side="right")


def check_alpha_scaling(alpha, lo: float, hi: float, precision: int = 30, *,
                        domain: str = "threshold", engine: PrimeEngine | None = None) -> InequalityReport:
    """pi(alpha x) < alpha pi(x) on every constancy piece of [lo, hi].

    ``domain`` selects the precondition: ``"threshold"`` (x > exp(4 / log^2 alpha)),
    ``"small-alpha"`` (alpha >= e^(1/4), x >= 364) or ``"none"`` to explore below
    the thresholds.
    """
    engine = engine or default_engine()
    with mp.workdps(precision):
        a = mpf(alpha)
        if not a > 1:
            raise DomainError("alpha must exceed 1")
        thr = mp.exp(4 / mp.log(a) ** 2)
        if domain == "threshold" and not lo > thr:
            raise DomainError(f"need x > exp(4/log^2 alpha) = {mpmath.nstr(thr, 10)}, got lo={lo}")
        # float inputs for e^(1/4) land within an ulp of it
        if domain == "small-alpha" and (a < mp.exp(mpf(1) / 4) - mpf(2) ** -50 or lo < 364):
            raise DomainError("small-alpha form needs alpha >= e^(1/4) and x >= 364")
        if domain not in ("threshold", "small-alpha", "none"):
            raise ValueError(f"unknown domain mode {domain!r}")
    af = float(a)
    top = int(math.floor(af * hi)) + 1
    if top > engine.sieve_limit:
        raise CapacityError(f"alpha*hi = {af * hi:.4g} beyond sieve limit {engine.sieve_limit}")
    primes = engine.primes_upto(top)
    # piece starts: lo, every prime p in (lo, hi], every q/alpha with q prime in (alpha lo, alpha hi]
    P = primes[(primes > lo) & (primes <= hi)]
    Q = primes[(primes > af * lo) & (primes <= af * hi)]
    starts = np.concatenate([[float(lo)], P.astype(np.float64), Q / af])
    # one side of every event is an exact index; the other is a float floor checked below
    pi_x = np.concatenate([[0], _counts_at(primes, P), _counts_at(primes, np.floor(Q / af))])
    pi_ax = np.concatenate([[0], _counts_at(primes, np.floor(af * P)), _counts_at(primes, Q)])
    cross = np.concatenate([[0.5], af * P, Q / af])
    frac = cross - np.floor(cross)
    redo = np.flatnonzero((frac < 1e-7) | (frac > 1 - 1e-7))
    with mp.workdps(precision):
        pi_x[0] = lucy_pi(int(mp.floor(mpf(lo))))
        pi_ax[0] = lucy_pi(int(mp.floor(a * mpf(lo))))
        for j in redo.tolist():
            if j <= len(P):
                pi_ax[j] = lucy_pi(int(mp.floor(a * int(P[j - 1]))))
            else:
                pi_x[j] = lucy_pi(int(mp.floor(int(Q[j - 1 - len(P)]) / a)))
    margin = af * pi_x - pi_ax
    i = int(np.argmin(margin))
    with mp.workdps(precision):
        worst = a * int(pi_x[i]) - int(pi_ax[i])
        holds = bool(np.all(margin > 1e-9)) and worst > 0
        if not holds:
            bad = np.flatnonzero(margin <= 1e-9)
            holds = all(a * int(pi_x[k]) - int(pi_ax[k]) > 0 for k in bad.tolist())
    return InequalityReport(
        f"ALPHA_SCALING[{mpmath.nstr(a, 12)}]", lo, hi, holds, worst, float(starts[i]), len(starts),
        details={"alpha": str(alpha), "domain_mode": domain, "threshold": thr,
                 "pi_x": int(pi_x[i]), "pi_alpha_x": int(pi_ax[i])},
    )


def check_subadditivity(epsilon, xs: Sequence[int], y_count: int = 100, precision: int = 30, *,
                        enforce_domain: bool = True, engine: PrimeEngine | None = None) -> InequalityReport:
    """pi(x + y) < pi(x) + pi(y) for each sampled x and a y-grid across [eps x, x]."""
    engine = engine or default_engine()
    with mp.workdps(precision):
        eps = mpf(epsilon)
        if not 0 < eps <= 1:
            raise DomainError("epsilon must lie in (0, 1]")
        thr = mp.exp(9 / eps**2)
    xs = [int(x) for x in xs]
    if enforce_domain:
        low = [x for x in xs if x < thr]
        if low:
            raise DomainError(f"x={low[0]} below exp(9/eps^2) = {mpmath.nstr(thr, 10)}")
    top = 2 * max(xs)
    if top > engine.sieve_limit:
        raise CapacityError(f"x + y up to {top} beyond sieve limit")
    primes = engine.primes_upto(top)
    pairs_x, pairs_y = [], []
    for x in xs:
        y_lo = int(mp.ceil(eps * x))
        ys = np.unique(np.linspace(y_lo, x, num=max(1, y_count)).round().astype(np.int64))
        pairs_x.append(np.full(len(ys), x, dtype=np.int64))
        pairs_y.append(ys)
    X, Y = np.concatenate(pairs_x), np.concatenate(pairs_y)
    margin = _counts_at(primes, X) + _counts_at(primes, Y) - _counts_at(primes, X + Y)
    i = int(np.argmin(margin))
    return InequalityReport(
        f"SUBADDITIVITY[{mpmath.nstr(eps, 10)}]", min(xs), max(xs), bool(np.all(margin > 0)),
        mpf(int(margin[i])), [int(X[i]), int(Y[i])], len(X),
        details={"epsilon": str(epsilon), "threshold": thr, "sampling": {"xs": xs, "y_count": y_count,
                 "y_grid": "rounded linspace over [ceil(eps x), x]"}},
    )


def cubic_predicate_check(points: int = 10**6, direct_points: int = 2000) -> InequalityReport:
    """2v^3 - 5v^2 + 3v - 1 < 0 on (0, log^-1/2 6400], and agreement with the
    inequality it encodes, (1 + v^2 - 2v^3/3)(1 - v^2 + v^3) > 1.

    The direct form's margin is ~v^3/3, so it is evaluated in mpmath on a
    coarser grid.
    """
    vmax = 1 / math.sqrt(math.log(6400))
    v = np.linspace(vmax / points, vmax, points)
    cubic = 2 * v**3 - 5 * v**2 + 3 * v - 1
    agree = True
    with mp.workdps(50):
        for k in range(1, direct_points + 1):
            w = mpf(vmax) * k / direct_points
            c = 2 * w**3 - 5 * w**2 + 3 * w - 1
            d = (1 + w**2 - 2 * w**3 / 3) * (1 - w**2 + w**3) - 1
            agree &= (c < 0) == (d > 0)
    i = int(np.argmax(cubic))
    return InequalityReport("CUBIC_V", float(v[0]), vmax, bool(np.all(cubic < 0)) and agree,
                            mpf(-float(cubic[i])), float(v[i]), points,
                            details={"agrees_with_direct_form": agree, "direct_points": direct_points})
