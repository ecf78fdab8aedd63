"""The gap function G(x) = pi(x)^2 - (e x / log x) pi(x/e) in extended precision.

Two evaluation routes:

* ``g_exact(x)``: exact prime counts, transcendental factor in mpmath.
* ``g_asymptotic(t)``: x = e^t with pi replaced by a smooth model.  Both models
  reduce to

      G(e^t) = e^{2t} (r(t)^2 - r(t-1)/t)

  with r(t) = S(t) (five-term series, ``model="pnt5"``) or
  r(t) = e^{-t} Ei(t) (logarithmic integral, ``model="li"``).  Everything is
  parameterised by t; x itself is never formed.

The inner difference loses about 4 log10(t) digits to cancellation, so the
working precision carries that many guard digits on top of the requested
precision (checked after the fact and redone if the estimate was short).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf

from .errors import DomainError, PrecisionError
from .primes import PrimeEngine, default_engine, map_ordered
from .reports import InequalityReport
from .widereal import DEFAULT_PRECISION, MAX_PRECISION, check_precision, sci

MODELS = ("li", "pnt5")
DEFAULT_MODEL = "li"
GUARD_DIGITS = 10

# (t, printed value) for the reference grid
TABLE1_T = ["43.5102147"] + [str(t) for t in (49, 59)] + [str(t) for t in range(159, 3160, 100)]
TABLE1_REF = [
    "-1.2984816e28", "-3.5777143e32", "-5.3863026e40", "-8.6366147e124",
    "-3.2250049e210", "-3.2357043e296", "-5.3064365e382", "-1.1686993e469",
    "-3.1339236e555", "-9.6742945e641", "-3.3194561e728", "-1.2367077e815",
    "-4.9214899e901", "-2.0671392e988", "-9.0822473e1074", "-4.1454353e1161",
    "-1.9549848e1248", "-9.4847597e1334", "-4.7172079e1421", "-2.3980349e1508",
    "-1.2430367e1595", "-6.5566576e1681", "-3.5131458e1768", "-1.9093149e1855",
    "-1.0511565e1942", "-5.8557034e2028", "-3.2975152e2115", "-1.8754944e2202",
    "-1.0765501e2289", "-6.2322859e2375", "-3.6365683e2462", "-2.1376236e2549",
    "-1.2651826e2636", "-7.5364298e2722",
]
TABLE_REL_TOL = 5e-7
T_MIN = 20
T_SCAN = ("43.5102147", "3159")


@dataclass
class GEvaluation:
    t: object  # mpf, log x
    g: object  # mpf
    log_neg_g: object | None  # log(-g) when g < 0
    method: str  # "exact" | "asymptotic"
    model: str = ""
    precision: int = DEFAULT_PRECISION
    details: dict = field(default_factory=dict)

    @property
    def sign(self) -> int:
        return (self.g > 0) - (self.g < 0)

    def render(self, digits: int = 8) -> str:
        return sci(self.g, digits)


def pnt5(t, precision: int = DEFAULT_PRECISION):
    """S(t) = sum_{k=0}^{4} k!/t^{k+1}, so that pi(e^t) ~ e^t S(t)."""
    with mp.workdps(precision):
        t = mpf(t)
        if t <= 1:
            raise DomainError("pnt5 needs t > 1")
        return mp.fsum(mp.factorial(k) / t ** (k + 1) for k in range(5))


def _r(t, model: str):
    if model == "li":
        return mp.ei(t) * mp.exp(-t)
    if model == "pnt5":
        return mp.fsum(mp.factorial(k) / t ** (k + 1) for k in range(5))
    raise ValueError(f"unknown model {model!r}; choose from {MODELS}")


def _inner(t, model: str, wp: int):
    """(r(t)^2 - r(t-1)/t, magnitude of the larger operand) at wp digits."""
    with mp.workdps(wp):
        a = _r(t, model) ** 2
        b = _r(t - 1, model) / t
        return a - b, max(abs(a), abs(b))


def g_asymptotic(t, precision: int = DEFAULT_PRECISION, model: str = DEFAULT_MODEL,
                 max_precision: int = MAX_PRECISION, *, check_regime: bool = True) -> GEvaluation:
    """Model value of G(e^t).  ``check_regime=False`` allows t < 20 for comparisons."""
    check_precision(precision)
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; choose from {MODELS}")
    with mp.workdps(precision + GUARD_DIGITS):
        t = mpf(t)
    if check_regime and t < T_MIN:
        raise DomainError(f"asymptotic evaluation needs t >= {T_MIN}")
    if t <= 2:
        raise DomainError("the models need t > 2")
    need = precision + int(4 * math.log10(float(t))) + GUARD_DIGITS
    while True:
        if need > max_precision:
            raise PrecisionError(
                f"t={mpmath.nstr(t, 12)}: {precision} correct digits need {need} working digits "
                f"(cap {max_precision})")
        d, big = _inner(t, model, need)
        if d == 0:
            lost = need
        else:
            lost = max(0, int(math.ceil(float(mp.log10(big / abs(d))))))
        if need - lost >= precision + 2:
            break
        need = precision + lost + GUARD_DIGITS
    with mp.workdps(need):
        g = mp.exp(2 * t) * d
        log_neg = 2 * t + mp.log(-d) if d < 0 else None
    with mp.workdps(precision):
        return GEvaluation(+t, +g, (+log_neg if log_neg is not None else None), "asymptotic", model,
                           precision, {"working_digits": need, "cancelled_digits": lost})


# --- exact evaluation ------------------------------------------------------

def floor_div_e(x: int) -> int:
    """floor(x / e), exact: e carried to len(x) + 40 digits."""
    x = int(x)
    if x < 0:
        raise ValueError("x must be >= 0")
    with mp.workdps(len(str(x)) + 40):
        q = mpf(x) / mp.e
        f = int(mp.floor(q))
        # e is irrational, so x/e is never an integer; the margin proves the floor
        assert q - f > mpf(10) ** -30 and f + 1 - q > mpf(10) ** -30
        return f


def g_exact(x: int, precision: int = DEFAULT_PRECISION, engine: PrimeEngine | None = None) -> GEvaluation:
    """G(x) with exact counts; the only rounding is in e x / log x."""
    check_precision(precision)
    x = int(x)
    if x < 2:
        raise DomainError("g_exact needs x >= 2")
    eng = engine or default_engine()
    pi_x = eng.pi_exact_sublinear(x).pi
    m = floor_div_e(x)
    pi_m = eng.pi(m)
    return _g_from_counts(x, pi_x, m, pi_m, precision)


def _g_from_counts(x: int, pi_x: int, m: int, pi_m: int, precision: int) -> GEvaluation:
    with mp.workdps(precision):
        t = mp.log(x)
        g = mpf(pi_x) ** 2 - mp.e * x / t * pi_m
        log_neg = mp.log(-g) if g < 0 else None
        return GEvaluation(t, g, log_neg, "exact", "", precision,
                           {"x": x, "pi_x": pi_x, "floor_x_over_e": m, "pi_x_over_e": pi_m})


# --- table / scans ---------------------------------------------------------

@dataclass
class TableRow:
    t: str
    value: GEvaluation
    rendered: str
    reference: str | None = None
    rel_err: object | None = None
    within_tol: bool | None = None

    def to_dict(self) -> dict:
        return {"t": self.t, "G": self.rendered, "log_neg_G": mpmath.nstr(self.value.log_neg_g, 17),
                "reference": self.reference,
                "rel_err": mpmath.nstr(self.rel_err, 3) if self.rel_err is not None else None,
                "within_tol": self.within_tol}


def _eval_row(t, precision, model):
    return g_asymptotic(t, precision, model)


def table_emit(t_values=None, precision: int = DEFAULT_PRECISION, model: str = DEFAULT_MODEL,
               jobs: int = 1) -> list[TableRow]:
    """Rows of G(e^t); the default grid carries the printed reference values."""
    if t_values is None:
        t_values, refs = TABLE1_T, TABLE1_REF
    else:
        t_values = [str(t) for t in t_values]
        lookup = dict(zip(TABLE1_T, TABLE1_REF))
        refs = [lookup.get(t) for t in t_values]
    for t in t_values:
        if mpf(t) < T_MIN:
            raise DomainError(f"table rows need t >= {T_MIN}, got {t}")
    vals = map_ordered(_eval_row, [(t, precision, model) for t in t_values], jobs)
    rows = []
    for t, ref, v in zip(t_values, refs, vals):
        row = TableRow(t, v, v.render(8), ref)
        if ref is not None:
            with mp.workdps(precision):
                rel = abs(v.g / mpf(ref) - 1)
            row.rel_err, row.within_tol = rel, bool(rel <= TABLE_REL_TOL)
        rows.append(row)
    return rows


def _grid(t_lo, t_hi, steps: int, precision: int) -> list:
    if steps < 2:
        raise ValueError("a scan grid needs at least 2 points")
    with mp.workdps(precision + GUARD_DIGITS):
        lo, hi = mpf(t_lo), mpf(t_hi)
        if not lo < hi:
            raise ValueError(f"degenerate grid: t_lo={t_lo} is not below t_hi={t_hi}")
        return [lo + (hi - lo) * k / (steps - 1) for k in range(steps)]


def _eval_chunk(ts, precision, model):
    return [g_asymptotic(t, precision, model) for t in ts]


def evaluate_grid(ts, precision: int = DEFAULT_PRECISION, model: str = DEFAULT_MODEL, jobs: int = 1):
    chunks = [ts[i::jobs] for i in range(jobs)] if jobs > 1 else [ts]
    parts = map_ordered(_eval_chunk, [(c, precision, model) for c in chunks], jobs)
    out = [None] * len(ts)
    for j, part in enumerate(parts):
        out[j::len(chunks)] = part
    return out


def monotonicity_scan(t_lo=T_SCAN[0], t_hi=T_SCAN[1], steps: int = 10**4,
                      precision: int = DEFAULT_PRECISION, model: str = DEFAULT_MODEL,
                      jobs: int = 1) -> InequalityReport:
    """G(e^t) < 0 and strictly decreasing along an equally spaced t grid.

    worst_margin is the smallest step in log(-G); a positive value means every
    grid value is more negative than its predecessor.  The smallest ratio
    G(t_{k+1})/G(t_k) is in the details.
    """
    ts = _grid(t_lo, t_hi, steps, precision)
    vals = evaluate_grid(ts, precision, model, jobs)
    negative = all(v.g < 0 for v in vals)
    worst, at = None, None
    with mp.workdps(precision):
        if negative:
            for a, b in zip(vals, vals[1:]):
                step = b.log_neg_g - a.log_neg_g
                if worst is None or step < worst:
                    worst, at = step, a.t
        else:
            bad = next(v for v in vals if v.g >= 0)
            worst, at = mpf(-1), bad.t
        return InequalityReport(
            "G_MONOTONE", ts[0], ts[-1], bool(negative and worst > 0), worst, at, len(ts),
            details={"model": model, "worst_ratio": mp.exp(worst) if negative else None,
                     "all_negative": negative},
        )


def plot_rows(t_lo, t_hi, steps: int, precision: int = DEFAULT_PRECISION,
              model: str = DEFAULT_MODEL, jobs: int = 1) -> list[GEvaluation]:
    return evaluate_grid(_grid(t_lo, t_hi, steps, precision), precision, model, jobs)


def plot_csv(rows: list[GEvaluation]) -> str:
    """CSV text with header ``t,log_neg_g``, 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "log_neg_g"])
    for r in rows:
        w.writerow([mpmath.nstr(r.t, 17), mpmath.nstr(r.log_neg_g, 17) if r.log_neg_g is not None else "nan"])
    return buf.getvalue()


# --- lower bound pi(x) > x / log x ------------------------------------------

def verify_eq31(t) -> tuple[bool, dict]:
    """pi(x) > x / t at x = e^t, derived from pi(x) > x/(t - 1 + t^-1/2).

    The second denominator is below t exactly when t^-1/2 < 1, i.e. t > 1.
    The lower bound itself is established only for x >= 59, flagged in the
    certificate as ``in_support``.
    """
    with mp.workdps(30):
        t = mpf(t)
        if t <= 1:
            raise DomainError("the comparison needs t > 1")
        denom = t - 1 + 1 / mp.sqrt(t)
        holds = bool(denom < t)
        in_support = bool(t >= mp.log(59))
        cert = {
            "t": t,
            "bound_denominator": denom,
            "compared_denominator": t,
            "condition": "t^(-1/2) < 1",
            "condition_value": 1 / mp.sqrt(t),
            "holds": holds,
            "in_support": in_support,
            "support": "x >= 59",
        }
        return holds, cert
