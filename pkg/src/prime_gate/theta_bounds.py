"""Explicit inequalities for Chebyshev's theta function, checked exhaustively.

Seven named bounds: the five two-sided / one-sided estimates valid on their
own ranges of x, and the lower and upper halves of the sandwich

    x (1 - 2 / (3 log^1.5 x)) < theta(x) < x (1 + 1 / (3 log^1.5 x)),  x >= 6400.
"""
from __future__ import annotations

import math

from .primes import PrimeEngine
from .reports import InequalityReport
from .stepcheck import StepBound, breakpoints, check_step_bounds

E22 = math.exp(22)
LIMIT_1E8 = 1e8


def _p1(x, th, lib):
    return x - th


def _p2(x, th, lib):
    return lib.c("2.05282") * lib.sqrt(x) - lib.abs(th - x)


def _p3(x, th, lib):
    return lib.c("0.0239922") * x / lib.log(x) - lib.abs(th - x)


def _p4(x, th, lib):
    return lib.c("0.0077629") * x / lib.log(x) - lib.abs(th - x)


def _p5(x, th, lib):
    return lib.c("8.072") * x / lib.log(x) ** 2 - lib.abs(th - x)


def _lemma_lower(x, th, lib):
    return th - x * (1 - 2 / (3 * lib.log(x) ** lib.c("1.5")))


def _lemma_upper(x, th, lib):
    return x * (1 + 1 / (3 * lib.log(x) ** lib.c("1.5"))) - th


ITEMS: dict[str, StepBound] = {
    "P1_1": StepBound("P1_1", "theta", _p1, 1.0, hi_max=LIMIT_1E8,
                      domain="theta(x) < x for x < 1e8"),
    "P1_2": StepBound("P1_2", "theta", _p2, 1.0, hi_max=LIMIT_1E8,
                      domain="|theta(x) - x| < 2.05282 sqrt(x) for x < 1e8"),
    "P1_3": StepBound("P1_3", "theta", _p3, 758711.0,
                      domain="|theta(x) - x| < 0.0239922 x/log x for x >= 758711"),
    "P1_4": StepBound("P1_4", "theta", _p4, E22,
                      domain="|theta(x) - x| < 0.0077629 x/log x for x >= exp(22)"),
    # x / log^2 x is concave only for log x > 3
    "P1_5": StepBound("P1_5", "theta", _p5, 1.0, lo_strict=True, dense_below=21.0,
                      domain="|theta(x) - x| < 8.072 x/log^2 x for x > 1"),
    "LEMMA1_LOWER": StepBound("LEMMA1_LOWER", "theta", _lemma_lower, 6400.0,
                              domain="theta(x) > x(1 - 2/(3 log^1.5 x)) for x >= 6400"),
    "LEMMA1_UPPER": StepBound("LEMMA1_UPPER", "theta", _lemma_upper, 6400.0,
                              domain="theta(x) < x(1 + 1/(3 log^1.5 x)) for x >= 6400"),
}


def _resolve(item: str) -> StepBound:
    key = item.upper().replace(".", "_")
    if key not in ITEMS:
        raise KeyError(f"unknown theta bound {item!r}; choose from {sorted(ITEMS)}")
    return ITEMS[key]


def check_theta_bounds(items, lo: float, hi: float, precision: int = 30, *,
                       include_endpoint: bool | None = None, engine: PrimeEngine | None = None,
                       parts: int = 1, jobs: int = 1, partial: bool = False) -> dict[str, InequalityReport]:
    """Check several theta bounds in one sieve pass over [lo, hi].

    ``include_endpoint`` only matters when ``hi`` equals a bound's strict upper
    limit (1e8 for P1_1/P1_2).  ``False`` treats that endpoint as a left
    limit, ``True`` evaluates it too (and then the domain check rejects it).
    By default the endpoint is included unless it sits on such a limit.
    """
    bounds = [_resolve(i) for i in items]
    if include_endpoint is None:
        include_endpoint = not any(b.hi_max is not None and hi == b.hi_max for b in bounds)
    return check_step_bounds(bounds, lo, hi, engine=engine, precision=precision,
                             include_hi=include_endpoint, parts=parts, jobs=jobs, partial=partial)


def check_theta_bound(item: str, lo: float, hi: float, precision: int = 30, **kw) -> InequalityReport:
    bd = _resolve(item)
    return check_theta_bounds([bd.name], lo, hi, precision, **kw)[bd.name]


__all__ = ["ITEMS", "check_theta_bound", "check_theta_bounds", "breakpoints"]
