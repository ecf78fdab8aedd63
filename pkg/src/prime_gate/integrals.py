"""Upper bounds for integrals of 1/log^3 t and 1/log^3.5 t via convexity.

For convex u on [a, b] and any n,

    int_a^b u <= (b - a)/n * (u(a) + u(b) + sum_{k=1}^{n-1} u(a + k (b - a)/n)),

which is the trapezoid sum (itself an upper bound for convex u) plus
h (u(a) + u(b)) / 2.  Long ranges are split at the powers of e.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf

from .errors import DomainError
from .reports import InequalityReport
from .widereal import NeumaierSum

# relative error allowance for the float64 path: a few dozen ulps are
# justified (log within 4 ulps, grid rounding, exactly rounded fsum); 1e-12
# leaves three orders of headroom.
FAST_REL_ERR = 1e-12

INTEGRANDS = {
    "inv_log_cubed": 3.0,
    "inv_log_3_5": 3.5,
}


def _power(u: str) -> float:
    try:
        return INTEGRANDS[u]
    except KeyError:
        raise ValueError(f"unknown integrand {u!r}; choose from {sorted(INTEGRANDS)}") from None


@dataclass
class ConvexIntegralResult:
    a: object
    b: object
    n: int
    upper_bound: object  # mpf
    integrand: str = "inv_log_cubed"
    method: str = "fast"


def convex_upper_sum(u: str, a, b, n: int, precision: int = 30, method: str = "fast") -> ConvexIntegralResult:
    """The convexity bound on [a, b] with n equal steps.

    ``method="exact"`` sums in mpmath (compensated); ``"fast"`` sums float64
    values with ``math.fsum`` and returns the sum inflated by FAST_REL_ERR plus
    the endpoint-rounding slack, so the result is still an upper bound.
    """
    k = _power(u)
    if n < 1:
        raise ValueError("n must be >= 1")
    with mp.workdps(precision):
        a_m, b_m = mpf(a), mpf(b)
        if not (2 <= a_m < b_m):
            raise DomainError(f"need 2 <= a < b, got [{a}, {b}]")
        if method == "exact":
            h = (b_m - a_m) / n
            acc = NeumaierSum()
            acc.add(mp.log(a_m) ** -k)
            acc.add(mp.log(b_m) ** -k)
            for j in range(1, n):
                acc.add(mp.log(a_m + j * h) ** -k)
            ub = h * acc.value
        elif method == "fast":
            af, bf = float(a_m), float(b_m)
            hf = (bf - af) / n
            grid = af + np.arange(1, n, dtype=np.float64) * hf
            vals = np.log(grid) ** -k
            s = math.fsum(vals.tolist()) + math.log(af) ** -k + math.log(bf) ** -k
            ub = mpf((bf - af) / n) * mpf(s) * (1 + mpf(FAST_REL_ERR))
            # [af, bf] may miss a sliver of [a, b]; u <= u(a) covers it
            slack = (abs(a_m - af) + abs(b_m - bf)) * mp.log(min(a_m, mpf(af))) ** -k
            ub += slack
        else:
            raise ValueError(f"unknown method {method!r}")
        return ConvexIntegralResult(a_m, b_m, n, +ub, u, method)


def e_power_pieces(a, b) -> list[tuple]:
    """[a, b] cut at every e^k strictly inside it."""
    a, b = mpf(a), mpf(b)
    cuts = [a]
    k = int(mp.floor(mp.log(a))) + 1
    while mp.exp(k) < b:
        cuts.append(mp.exp(k))
        k += 1
    cuts.append(b)
    return list(zip(cuts[:-1], cuts[1:]))


@dataclass
class CompositeResult:
    upper_bound: object
    pieces: list


def composite_upper(u: str, a, b, n: int = 10**5, precision: int = 30, method: str = "fast") -> CompositeResult:
    """Convexity bound on [a, b] summed over the e-power pieces, n steps each."""
    with mp.workdps(precision + 10):
        pieces = [convex_upper_sum(u, pa, pb, n, precision + 10, method) for pa, pb in e_power_pieces(a, b)]
        total = mp.fsum(r.upper_bound for r in pieces)
    with mp.workdps(precision):
        return CompositeResult(+total, pieces)


def simpson_oracle(u: str, a, b, rel_tol: float = 1e-10, start: int = 64, max_n: int = 1 << 24) -> float:
    """Composite Simpson on each e-power piece, doubling until the relative change < rel_tol."""
    k = _power(u)
    total = 0.0
    for pa, pb in e_power_pieces(a, b):
        af, bf = float(pa), float(pb)
        m = start
        prev = None
        while True:
            x = np.linspace(af, bf, m + 1)
            y = np.log(x) ** -k
            val = (bf - af) / (3 * m) * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())
            if prev is not None and abs(val - prev) <= rel_tol * abs(val):
                break
            if m >= max_n:
                break
            prev, m = val, 2 * m
        total += val
    return total


def quad_integral(u: str, a, b, precision: int = 30):
    """Reference value of the integral by mpmath's tanh-sinh quadrature."""
    k = _power(u)
    with mp.workdps(precision):
        nodes = [pa for pa, _ in e_power_pieces(a, b)] + [mpf(b)]
        return mp.quad(lambda t: mp.log(t) ** -k, nodes)


# --- auxiliary functions ---------------------------------------------------

H1_START = 18.25  # log of the point where h1 is examined
H2_RANGE = (4000.0, 1e8)


def h1(x, integral_budget: ConvexIntegralResult | CompositeResult | None = None,
       precision: int = 30, n: int = 10**5):
    """Certified lower bound of (2/3) x / log^2.5 x - (7/3) int_2^x dt/log^3 t."""
    with mp.workdps(precision):
        x = mpf(x)
        if x < mp.exp(mpf(H1_START)) * (1 - mpf(10) ** (5 - precision)):
            raise DomainError("h1 is used for x >= exp(18.25)")
        budget = integral_budget or composite_upper("inv_log_cubed", 2, x, n, precision)
        return mpf(2) / 3 * x / mp.log(x) ** 2.5 - mpf(7) / 3 * budget.upper_bound


def h1_derivative(x, precision: int = 30):
    with mp.workdps(precision):
        L = mp.log(mpf(x))
        return mpf(2) / 3 * (L ** -2.5 - 2.5 * L ** -3.5) - mpf(7) / 3 * L ** -3


def h1_exact(x, precision: int = 30):
    """h1 with the integral by quadrature (used for finite differences)."""
    with mp.workdps(precision):
        x = mpf(x)
        return mpf(2) / 3 * x / mp.log(x) ** 2.5 - mpf(7) / 3 * quad_integral("inv_log_cubed", 2, x, precision)


def h2(x, integral_budget=None, precision: int = 30, n: int = 10**5):
    """Certified lower bound of x / log^2.5 x - 2 int_2^x dt/log^3 t + 2 / log^2 2."""
    if not H2_RANGE[0] <= float(x) < H2_RANGE[1]:
        raise DomainError("h2 is used for 4000 <= x < 1e8")
    with mp.workdps(precision):
        x = mpf(x)
        budget = integral_budget or composite_upper("inv_log_cubed", 2, x, n, precision)
        return x / mp.log(x) ** 2.5 - 2 * budget.upper_bound + 2 / mp.log(2) ** 2


def h2_derivative(x, precision: int = 30):
    with mp.workdps(precision):
        L = mp.log(mpf(x))
        return L ** -2.5 - 2.5 * L ** -3.5 - 2 * L ** -3


def h2_exact(x, precision: int = 30):
    with mp.workdps(precision):
        x = mpf(x)
        return x / mp.log(x) ** 2.5 - 2 * quad_integral("inv_log_cubed", 2, x, precision) + 2 / mp.log(2) ** 2


def h1_sign_check(precision: int = 30, n: int = 10**5) -> InequalityReport:
    """h1(exp(18.25)) > 0, with the two competing terms reported separately.

    h1 is increasing for log x = u >= 18.25 since its derivative is positive
    iff 2u - 7 sqrt(u) - 5 > 0.
    """
    with mp.workdps(precision):
        x = mp.exp(mpf(H1_START))
        budget = composite_upper("inv_log_cubed", 2, x, n, precision)
        val = h1(x, budget, precision)
        u = mpf(H1_START)
        deriv_poly = 2 * u - 7 * mp.sqrt(u) - 5
        return InequalityReport(
            "H1_SIGN", x, x, bool(val > 0 and deriv_poly > 0), val, "exp(18.25)", 1,
            details={"integral_upper": budget.upper_bound,
                     "integral_below_16870": bool(budget.upper_bound < 16870),
                     "three_times_leading": 2 * x / mp.log(x) ** 2.5,
                     "seven_times_integral": 7 * budget.upper_bound,
                     "derivative_polynomial_at_start": deriv_poly, "n_per_piece": n},
        )


def h2_sign_check(precision: int = 30, n: int = 10**5) -> InequalityReport:
    """h2(e^11) > 0; h2 increases once log x - 2 sqrt(log x) - 2.5 > 0 (x > 3797)."""
    with mp.workdps(precision):
        x = mp.exp(11)
        budget = composite_upper("inv_log_cubed", 2, x, n, precision)
        val = h2(x, budget, precision)
        L = mp.log(x)
        return InequalityReport(
            "H2_SIGN", x, x, bool(val > 0), val, "exp(11)", 1,
            details={"leading": x / L ** 2.5, "integral_upper": budget.upper_bound,
                     "twice_integral_below_140": bool(2 * budget.upper_bound < 140),
                     "increasing_from": mp.exp((1 + mp.sqrt(3.5)) ** 2), "n_per_piece": n},
        )


INTEGRAL_CAP = 16870


def check_integral_budget(n: int = 10**5, precision: int = 30) -> InequalityReport:
    """int_2^{exp(18.25)} dt/log^3 t: the convexity bound is below 16870 and above the true value.

    The true value comes from tanh-sinh quadrature; composite Simpson is
    reported alongside as an independent estimate.
    """
    with mp.workdps(precision):
        x = mp.exp(mpf(H1_START))
        ub = composite_upper("inv_log_cubed", 2, x, n, precision).upper_bound
        quad = quad_integral("inv_log_cubed", 2, x, precision)
        simpson = simpson_oracle("inv_log_cubed", 2, x)
        margin = INTEGRAL_CAP - ub
        return InequalityReport(
            "INTEGRAL_BUDGET", 2, x, bool(margin > 0 and ub >= quad), margin, "exp(18.25)", 1,
            details={"upper_bound": ub, "quadrature": quad, "simpson": simpson,
                     "above_quadrature": bool(ub >= quad), "cap": INTEGRAL_CAP, "n_per_piece": n},
        )
