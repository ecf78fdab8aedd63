"""InequalityReport: the outcome of checking one named inequality over a range."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

import mpmath
from mpmath import mpf


@dataclass
class InequalityReport:
    name: str
    lo: float
    hi: float
    holds: bool
    worst_margin: Any  # mpf
    witness: Any  # x attaining worst_margin (int, float or str for left limits)
    points_checked: int
    witness_side: str = "at"  # "at" x, or "left" limit x -> x^-
    partial: bool = False
    escalated: int = 0
    details: dict = field(default_factory=dict)

    @property
    def range(self) -> tuple:
        return (self.lo, self.hi)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "range": [_jsonable(self.lo), _jsonable(self.hi)],
            "holds": bool(self.holds),
            "worst_margin": mpmath.nstr(mpf(self.worst_margin), 20) if self.worst_margin is not None else None,
            "witness": _jsonable(self.witness),
            "witness_side": self.witness_side,
            "points_checked": int(self.points_checked),
            "partial": bool(self.partial),
            "escalated": int(self.escalated),
            **{k: _jsonable(v) for k, v in self.details.items()},
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def summary(self) -> str:
        tag = "PASS" if self.holds else "FAIL"
        part = " (partial)" if self.partial else ""
        at = f"{self.witness}-" if self.witness_side == "left" else f"{self.witness}"
        margin = mpmath.nstr(mpf(self.worst_margin), 8) if self.worst_margin is not None else "n/a"
        return (f"[{tag}] {self.name}{part} on [{_jsonable(self.lo)}, {_jsonable(self.hi)}]: "
                f"worst margin {margin} at {at}, {self.points_checked} points")


def _jsonable(v):
    if isinstance(v, mpf):
        return mpmath.nstr(v, 20)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):  # numpy scalar
        return v.item()
    return v


def merge_reports(parts: Iterable[InequalityReport]) -> InequalityReport:
    """Combine reports over adjacent sub-ranges; min margin, earliest witness on ties."""
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to merge")
    best = parts[0]
    for r in parts[1:]:
        if r.worst_margin < best.worst_margin:
            best = r
    return InequalityReport(
        name=parts[0].name,
        lo=parts[0].lo,
        hi=parts[-1].hi,
        holds=all(r.holds for r in parts),
        worst_margin=best.worst_margin,
        witness=best.witness,
        witness_side=best.witness_side,
        points_checked=sum(r.points_checked for r in parts),
        partial=any(r.partial for r in parts),
        escalated=sum(r.escalated for r in parts),
        details=dict(parts[0].details),
    )
