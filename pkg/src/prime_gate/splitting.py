"""Thresholds for pi(x) < e pi(x/e) obtained by splitting e = a + (e - a).

Writing pi(x) = pi(a x/e + (e - a) x/e), subadditivity with
eps = a/(e - a) and the scaling bound pi(b y) < b pi(y) at b = a and
b = e - a give pi(x) < e pi(x/e) as soon as x exceeds

    T1 = e/(e - a) exp(9 eps^-2)         (subadditivity, needs 0 < eps <= 1)
    T2 = exp(4 (log a)^-2 + 1)           (scaling by a, applied at x/e)
    T3 = exp(4 (log(e - a))^-2 + 1)      (scaling by e - a)

Everything is computed in log space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from mpmath import mp, mpf

from .errors import DomainError
from .highprec import verify_eq31
from .reports import InequalityReport
from .widereal import DEFAULT_PRECISION

MODES = ("strict", "inclusive")
REFERENCE_A = "1.359"
INVPHI = (math.sqrt(5) - 1) / 2


def log_thresholds(a, precision: int = DEFAULT_PRECISION) -> tuple:
    """(log T1, log T2, log T3) at a, no admissibility check."""
    with mp.workdps(precision):
        a = mpf(a)
        b = mp.e - a
        eps = a / b
        return (mp.log(mp.e / b) + 9 / eps ** 2,
                4 / mp.log(a) ** 2 + 1,
                4 / mp.log(b) ** 2 + 1)


@dataclass
class SplitThresholds:
    a: object
    eps: object
    T1: object
    T2: object
    T3: object
    x0: object
    log_x0: object
    logs: tuple = ()
    mode: str = "strict"

    @property
    def selector(self) -> str:
        return ("T1", "T2", "T3")[max(range(3), key=lambda i: self.logs[i])]

    def to_dict(self) -> dict:
        s = lambda v: mpmath.nstr(v, 15)
        return {"a": s(self.a), "eps": s(self.eps), "log_T1": s(self.logs[0]),
                "log_T2": s(self.logs[1]), "log_T3": s(self.logs[2]),
                "log_x0": s(self.log_x0), "selector": self.selector, "mode": self.mode}


def admissible(a, mode: str = "strict") -> bool:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    with mp.workdps(40):
        a = mpf(a)
        b = mp.e - a
        return bool(a > 1 and (a < b if mode == "strict" else a <= b))


def thresholds(a, precision: int = DEFAULT_PRECISION, mode: str = "strict") -> SplitThresholds:
    if not admissible(a, mode):
        rel = "<" if mode == "strict" else "<="
        raise DomainError(f"a={a} not admissible: need 1 < a {rel} e - a")
    with mp.workdps(precision):
        a = mpf(a)
        logs = log_thresholds(a, precision)
        lx = max(logs)
        return SplitThresholds(a, a / (mp.e - a), mp.exp(logs[0]), mp.exp(logs[1]), mp.exp(logs[2]),
                               mp.exp(lx), lx, logs, mode)


def _log_x0_grid(a: np.ndarray) -> np.ndarray:
    b = math.e - a
    eps = a / b
    return np.maximum.reduce([np.log(math.e / b) + 9 / eps ** 2,
                              4 / np.log(a) ** 2 + 1,
                              4 / np.log(b) ** 2 + 1])


def grid_oracle(lo: float, hi: float, points: int = 10**6) -> tuple[float, float]:
    """(argmin, min) of log x0 over an equally spaced float grid on [lo, hi]."""
    a = np.linspace(lo, hi, points)
    v = _log_x0_grid(a)
    k = int(np.argmin(v))
    return float(a[k]), float(v[k])


@dataclass
class OptimizeResult:
    a_star: object
    thresholds: SplitThresholds
    attained: bool
    mode: str
    infimum_log_x0: object
    grid_a: float
    grid_log_x0: float
    iterations: int
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        s = lambda v: mpmath.nstr(v, 15)
        return {"a_star": s(self.a_star), "log_x0": s(self.thresholds.log_x0), "attained": self.attained,
                "mode": self.mode, "infimum_log_x0": s(self.infimum_log_x0), "grid_a": self.grid_a,
                "grid_log_x0": self.grid_log_x0, "iterations": self.iterations,
                "thresholds": self.thresholds.to_dict()}


def optimize_a(lo=1.0, hi=None, tol: float = 1e-9, mode: str = "inclusive",
               precision: int = DEFAULT_PRECISION, grid_points: int = 10**6) -> OptimizeResult:
    """Minimise log x0(a) over [lo, hi] intersected with the admissible set.

    Golden-section search on the full three-way max (no dominance assumed),
    then the two interval ends are compared so boundary minima are returned
    exactly.  A dense float grid cross-checks the answer.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    with mp.workdps(precision):
        half = mp.e / 2
        lo_m = max(mpf(lo), mpf(1))
        hi_m = half if hi is None else min(mpf(hi), half)
        if mode == "strict" and lo_m >= half:
            raise DomainError("strict mode: the admissible interval below e/2 is empty")
        if lo_m >= hi_m:
            raise DomainError(f"empty search interval [{lo}, {hi}]")
        # log T2 blows up as a -> 1, so an open left end is nudged inward
        left = lo_m if lo_m > 1 else 1 + mpf(tol)
        f = lambda a: max(log_thresholds(a, precision))
        x, y = left, hi_m
        c = y - (y - x) * INVPHI
        d = x + (y - x) * INVPHI
        fc, fd = f(c), f(d)
        it = 0
        while y - x > tol:
            it += 1
            if fc < fd:
                y, d, fd = d, c, fc
                c = y - (y - x) * INVPHI
                fc = f(c)
            else:
                x, c, fc = c, d, fd
                d = x + (y - x) * INVPHI
                fd = f(d)
        cands = [(fc, c), (fd, d), (f(left), left), (f(hi_m), hi_m)]
        best_f, a_star = min(cands, key=lambda p: p[0])
        attained = True
        infimum = best_f
        if mode == "strict" and a_star >= half:
            # the infimum sits on the excluded end; report the approach point
            attained = False
            infimum = f(half)
            a_star = half - mpf(tol)
        th = thresholds(a_star, precision, "inclusive" if mode == "inclusive" else "strict")
        g_a, g_v = grid_oracle(float(left), float(hi_m), grid_points)
        spacing = float(hi_m - left) / (grid_points - 1)
        agree = abs(float(a_star) - g_a) <= max(10 * tol, spacing)
        return OptimizeResult(a_star, th, attained, mode, infimum, g_a, g_v, it,
                              {"grid_agrees": agree, "grid_spacing": spacing})


def dominance_check(lo=1.05, hi=None, points: int = 10**5, precision: int = 30) -> InequalityReport:
    """Whether T1 < min(T2, T3) on [lo, hi] (default hi = e/2), grid based.

    When it fails the report carries the crossover point, located by
    bisection on log T1 - log T3.
    """
    with mp.workdps(precision):
        hi = mp.e / 2 if hi is None else mpf(hi)
        a = np.linspace(float(lo), float(hi), points)
        b = math.e - a
        l1 = np.log(math.e / b) + 9 / (a / b) ** 2
        l23 = np.minimum(4 / np.log(a) ** 2 + 1, 4 / np.log(b) ** 2 + 1)
        margin = l23 - l1
        k = int(np.argmin(margin))
        holds = bool(margin.min() > 0)
        details = {"points": points}
        if not holds:
            bad = a[margin <= 0]
            details["violated_on"] = [float(bad.min()), float(bad.max())]
            g = lambda s: (lambda L: L[2] - L[0])(log_thresholds(s, precision))
            details["crossover_T1_T3"] = mp.findroot(g, (mpf(bad.max()), mpf(bad.max()) + (a[1] - a[0]) * 2),
                                                     solver="anderson")
        return InequalityReport("T1_DOMINATED", float(lo), float(hi), holds, mpf(float(margin[k])),
                                float(a[k]), points, details=details)


def derive_x0(precision: int = DEFAULT_PRECISION) -> tuple[SplitThresholds, list[dict]]:
    """Thresholds at a = 1.359 plus an ordered certificate of the chain of steps."""
    th = thresholds(REFERENCE_A, precision, "strict")
    s = lambda v: mpmath.nstr(v, 12)
    with mp.workdps(precision):
        lx0 = th.log_x0
        ok31, cert31 = verify_eq31(lx0)
        chain = [
            {"step": "split", "claim": "1 < a < e - a", "threshold": None,
             "value": f"a = {s(th.a)}, e - a = {s(mp.e - th.a)}", "holds": bool(1 < th.a < mp.e - th.a)},
            {"step": "subadditivity",
             "claim": "pi(x/e + y) < pi(x/e) + pi(y) for eps x/e <= y <= x/e with eps = a/(e-a)",
             "threshold": f"exp({s(th.logs[0])})", "value": f"eps = {s(th.eps)} < 1", "holds": bool(th.eps < 1)},
            {"step": "scaling-a", "claim": "pi(a x/e) < a pi(x/e)",
             "threshold": f"exp({s(th.logs[1])})", "holds": True},
            {"step": "scaling-e-minus-a", "claim": "pi((e-a) x/e) < (e-a) pi(x/e)",
             "threshold": f"exp({s(th.logs[2])})", "holds": True},
            {"step": "combine", "claim": "pi(x) < e pi(x/e)",
             "threshold": f"exp({mpmath.nstr(lx0, 9)})", "selector": th.selector, "holds": True},
            {"step": "lower-bound", "claim": "pi(x) > x / log x",
             "threshold": "59", "holds": ok31, "certificate": {k: str(v) for k, v in cert31.items()}},
            # G < 0 needs (x/log x) e pi(x/e) > pi(x)^2.  The two links above
            # give e pi(x/e) > pi(x) and x/log x < pi(x), which point opposite
            # ways, so they do not settle the product.
            {"step": "gap-sign", "claim": "G(x) < 0",
             "threshold": f"exp({mpmath.nstr(lx0, 9)})", "holds": None,
             "note": "not implied: needs x/log x >= pi(x), the reverse of the lower-bound step"},
        ]
    return th, chain
