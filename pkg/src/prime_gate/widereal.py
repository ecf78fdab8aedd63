"""Extended-precision helpers on top of mpmath.

``WideReal`` is simply ``mpmath.mpf``; every public function that returns one
takes a ``precision`` in decimal digits and evaluates inside
``mp.workdps(precision)`` so callers never depend on the global context.
"""
from __future__ import annotations

from contextlib import contextmanager
from typing import Iterable, Iterator

import mpmath
from mpmath import mp, mpf

WideReal = mpf

DEFAULT_PRECISION = 60
MIN_PRECISION = 30
MAX_PRECISION = 480


def check_precision(precision: int) -> int:
    if precision < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} digits, got {precision}")
    return int(precision)


@contextmanager
def working(precision: int) -> Iterator[None]:
    with mp.workdps(precision):
        yield


class NeumaierSum:
    """Running compensated sum of mpf terms (Neumaier's variant of Kahan).

    The compensation term recovers the low-order digits dropped by each
    addition, so the accumulated error stays O(eps) instead of O(n eps).
    """

    __slots__ = ("total", "comp")

    def __init__(self, start=0):
        self.total = mpf(start)
        self.comp = mpf(0)

    def add(self, x) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - t) + x
        else:
            self.comp += (x - t) + self.total
        self.total = t

    def extend(self, xs: Iterable) -> None:
        for x in xs:
            self.add(x)

    @property
    def value(self):
        return self.total + self.comp


def to_decimal_string(x, digits: int = 20) -> str:
    return mpmath.nstr(mpf(x), digits)


def sci(x, digits: int = 8) -> str:
    """Render ``x`` as ``d.ddddddd x 10^k`` style scientific text, e.g. ``-3.5777143e32``."""
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    ax = abs(x)
    k = int(mpmath.floor(mpmath.log10(ax)))
    m = ax / mpf(10) ** k
    m = mpmath.nint(m * mpf(10) ** (digits - 1)) / mpf(10) ** (digits - 1)
    if m >= 10:
        m /= 10
        k += 1
    mant = mpmath.nstr(m, digits, strip_zeros=False)
    return f"{sign}{mant}e{k}"
