"""Search for integers x with G(x) = pi(x)^2 - (e x / log x) pi(floor(x/e)) >= 0.

Since pi(x/e) = pi(floor(x/e)), checking integers covers the inequality at
every integer argument.  The bulk scan runs in float64 with a forward-error
envelope; anything inside the envelope, and every violation, is redone with
exact counts and mpmath transcendentals.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import gmpy2
import mpmath
import numpy as np
from mpmath import mp, mpf

from .errors import CapacityError, PrecisionError
from .highprec import floor_div_e
from .primes import PrimeEngine, default_engine, lucy_pi, map_ordered, partition
from .widereal import DEFAULT_PRECISION, MAX_PRECISION, check_precision

ENVELOPE_ULPS = 64  # relative error allowance of the float path, in units of 2^-52
FLOOR_SLACK = 1e-6  # x/e this close to an integer gets an exact floor
CHECKPOINT_EVERY = 10**8
RECHECK_PRECISION = 60


@dataclass
class ScanResult:
    lo: int
    hi: int
    violations: list = field(default_factory=list)  # [start, end] inclusive runs with G >= 0
    largest_violation: int | None = None
    points_rechecked_at_high_precision: int = 0
    escalated: int = 0
    points: int = 0

    @property
    def violation_count(self) -> int:
        return sum(b - a + 1 for a, b in self.violations)

    def same_violations(self, other: "ScanResult") -> bool:
        return [tuple(v) for v in self.violations] == [tuple(v) for v in other.violations]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["violations"] = [list(map(int, v)) for v in self.violations]
        d["violation_count"] = self.violation_count
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["start", "end"])
        w.writerows(self.violations)
        return buf.getvalue()

    @classmethod
    def from_dict(cls, d: dict) -> "ScanResult":
        keep = {k: d[k] for k in ("lo", "hi", "largest_violation", "points_rechecked_at_high_precision",
                                  "escalated", "points") if k in d}
        return cls(violations=[list(v) for v in d.get("violations", [])], **keep)


def _runs(xs: np.ndarray) -> list[list[int]]:
    """Maximal runs of consecutive integers in sorted ``xs``."""
    if len(xs) == 0:
        return []
    breaks = np.flatnonzero(np.diff(xs) != 1)
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [len(xs) - 1]])
    return [[int(xs[s]), int(xs[e])] for s, e in zip(starts, ends)]


def merge_runs(runs: list) -> list[list[int]]:
    out: list[list[int]] = []
    for a, b in sorted(runs):
        if out and a <= out[-1][1] + 1:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return out


def _floor_div_e_vec(xs: np.ndarray) -> np.ndarray:
    q = xs / math.e
    m = np.floor(q).astype(np.int64)
    frac = q - m
    close = np.flatnonzero((frac < FLOOR_SLACK) | (frac > 1 - FLOOR_SLACK))
    for k in close.tolist():
        m[k] = floor_div_e(int(xs[k]))
    return m


def fast_path(xs: np.ndarray, pi_x: np.ndarray, pi_m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """float64 G and its error envelope; the sign is certain where |G| > envelope."""
    xf = xs.astype(np.float64)
    sq = pi_x.astype(np.float64) ** 2
    rhs = math.e * xf / np.log(xf) * pi_m
    env = ENVELOPE_ULPS * 2.0**-52 * (sq + rhs) + 1e-9
    return sq - rhs, env


def _recheck(xs, pi_x, ms, pi_m, precision: int) -> list[bool]:
    """Whether G >= 0 at each point, evaluated at ``precision`` digits.

    Uses gmpy2 directly (several times faster than going through mpmath for
    millions of points); a point whose |G| does not clear the rounding bound
    is settled by ``check_point``-style escalation.
    """
    bits = int(precision * 3.33) + 8
    out = []
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        e = gmpy2.exp(1)
        tol = gmpy2.mpfr(2) ** (4 - bits)
        for x, px, m, pm in zip(xs, pi_x, ms, pi_m):
            rhs = e * x / gmpy2.log(x) * pm
            g = gmpy2.mpz(px) ** 2 - rhs
            if abs(g) > 8 * tol * rhs or pm == 0:
                out.append(g >= 0)
            else:
                out.append(_certify(x, px, m, pm, precision)[1] > 0)
    return out


def _scan_range(engine: PrimeEngine, lo: int, hi: int, precision: int) -> dict:
    """Scan integers in [lo, hi); returns violating x and counters."""
    found: list[np.ndarray] = []
    rechecked = escalated = 0
    m_block = None  # chained blocks for floor(x/e)
    for blk in engine.blocks(lo, hi):
        xs = np.arange(blk.lo, blk.hi, dtype=np.int64)
        pi_x = blk.pi_at_lo + np.cumsum(blk.bits, dtype=np.int64)
        ms = _floor_div_e_vec(xs)
        pi_m = np.zeros(len(xs), dtype=np.int64)
        live = ms >= 2
        if live.any():
            m_lo, m_hi = int(ms[live][0]), int(ms[-1]) + 1
            if m_block is not None and m_block.lo <= m_lo <= m_block.hi:
                # extend the chain from the previous window
                start, pi0 = m_block.hi, m_block.pi_at_hi
                base_lo, base_pi = m_block.lo, m_block.pi_at_lo
                prev_bits = m_block.bits
                m_new = engine.sieve_range(start, m_hi, pi0) if m_hi > start else None
                bits = np.concatenate([prev_bits, m_new.bits]) if m_new is not None else prev_bits
                cum = base_pi + np.cumsum(bits, dtype=np.int64)
                pi_m[live] = cum[ms[live] - base_lo]
                m_block = m_new if m_new is not None else m_block
            else:
                m_block = engine.sieve_range(m_lo, m_hi, lucy_pi(m_lo - 1))
                cum = m_block.pi_at_lo + np.cumsum(m_block.bits, dtype=np.int64)
                pi_m[live] = cum[ms[live] - m_block.lo]
        g, env = fast_path(xs, pi_x, pi_m)
        unsure = np.flatnonzero(np.abs(g) <= env)
        sure_bad = np.flatnonzero(g > env)
        idx = np.concatenate([sure_bad, unsure])
        verdict = _recheck(xs[idx].tolist(), pi_x[idx].tolist(), ms[idx].tolist(), pi_m[idx].tolist(),
                           max(precision, RECHECK_PRECISION))
        if not all(verdict[:len(sure_bad)]):  # pragma: no cover - would mean the envelope is unsound
            raise AssertionError("float envelope unsound")
        bad = idx[np.array(verdict, dtype=bool)] if len(idx) else idx
        bad = xs[np.sort(bad)].tolist()
        rechecked += len(idx)
        escalated += len(unsure)
        if bad:
            found.append(np.array(sorted(bad), dtype=np.int64))
    xs = np.concatenate(found) if found else np.zeros(0, dtype=np.int64)
    return {"runs": _runs(xs), "rechecked": rechecked, "escalated": escalated}


def _scan_part(engine, lo, hi, precision):
    return _scan_range(engine, lo, hi, precision)


def scan_exhaustive(lo: int, hi: int, *, engine: PrimeEngine | None = None, parts: int = 1, jobs: int = 1,
                    precision: int = RECHECK_PRECISION, checkpoint: str | os.PathLike | None = None,
                    checkpoint_every: int = CHECKPOINT_EVERY) -> ScanResult:
    """Every integer x in [lo, hi] (inclusive) with G(x) >= 0, as maximal runs.

    With ``checkpoint`` set, progress is stored every ``checkpoint_every``
    integers and a rerun with the same range resumes from the saved state.
    """
    check_precision(precision)
    engine = engine or default_engine()
    lo, hi = int(lo), int(hi)
    if lo < 2 or hi < lo:
        raise ValueError(f"need 2 <= lo <= hi, got [{lo}, {hi}]")
    if hi > engine.sieve_limit:
        raise CapacityError(f"hi={hi} above sieve limit {engine.sieve_limit}")
    res = ScanResult(lo, hi)
    start = lo
    if checkpoint is not None and Path(checkpoint).exists():
        state = json.loads(Path(checkpoint).read_text())
        if state.get("lo") == lo and state.get("hi") == hi:
            res = ScanResult.from_dict(state["result"])
            start = int(state["next"])
    while start <= hi:
        stop = min(hi, start + checkpoint_every - 1) if checkpoint is not None else hi
        pieces = partition(start, stop + 1, parts)
        outs = map_ordered(_scan_part, [(engine, a, b, precision) for a, b in pieces], jobs)
        for o in outs:
            res.violations.extend(o["runs"])
            res.points_rechecked_at_high_precision += o["rechecked"]
            res.escalated += o["escalated"]
        res.violations = merge_runs(res.violations)
        res.points += stop + 1 - start
        start = stop + 1
        if checkpoint is not None:
            tmp = Path(str(checkpoint) + ".tmp")
            tmp.write_text(json.dumps({"lo": lo, "hi": hi, "next": start, "result": res.to_dict()}))
            os.replace(tmp, checkpoint)
    res.largest_violation = res.violations[-1][1] if res.violations else None
    return res


# --- single points ---------------------------------------------------------

@dataclass
class PointCertificate:
    x: int
    pi_x: int
    floor_x_over_e: int
    pi_x_over_e: int
    factor: object  # e x / log x
    g: object
    error_bound: object
    precision: int
    sign: int

    @property
    def status(self) -> str:
        return "violation" if self.sign >= 0 else "holds"

    def to_dict(self) -> dict:
        s = lambda v: mpmath.nstr(v, 30)
        return {"x": self.x, "pi_x": self.pi_x, "floor_x_over_e": self.floor_x_over_e,
                "pi_x_over_e": self.pi_x_over_e, "factor": s(self.factor), "G": s(self.g),
                "error_bound": mpmath.nstr(self.error_bound, 5), "precision": self.precision,
                "sign": self.sign, "status": self.status}


def check_point(x: int, precision: int = DEFAULT_PRECISION, engine: PrimeEngine | None = None) -> PointCertificate:
    """Certified sign of G(x); digits double until |G| clears the rounding bound."""
    check_precision(precision)
    x = int(x)
    if x < 2:
        raise ValueError("check_point needs x >= 2")
    engine = engine or default_engine()
    pi_x = engine.pi_exact_sublinear(x).pi
    m = floor_div_e(x)
    pi_m = engine.pi(m)
    return _certify(x, pi_x, m, pi_m, precision)[0]


def _certify(x: int, pi_x: int, m: int, pi_m: int, precision: int) -> tuple[PointCertificate, int]:
    p = precision
    while True:
        with mp.workdps(p):
            factor = mp.e * x / mp.log(x)
            rhs = factor * pi_m
            g = mpf(pi_x) ** 2 - rhs
            # e, log and the two products/quotient each round once
            bound = abs(rhs) * 8 * mpf(10) ** (1 - p)
            if pi_m == 0:
                g, bound = mpf(pi_x) ** 2, mpf(0)
            if abs(g) > bound:
                sign = 1 if g > 0 else -1
                return PointCertificate(x, pi_x, m, pi_m, factor, g, bound, p, sign), sign
        if p >= MAX_PRECISION:
            raise PrecisionError(f"sign of G({x}) unresolved at {p} digits")
        p = min(2 * p, MAX_PRECISION)
