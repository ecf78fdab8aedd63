"""Exact primes, pi(x), theta(x) and p_n.

Two independent routes to pi(x):

* a segmented, odd-only sieve of Eratosthenes (numpy), used for everything
  that needs the individual primes, and
* a sublinear count over the floor values ``x // k`` (the Legendre / Lucy
  recursion, O(x^(3/4)) work), used for isolated large x such as the Galway
  point and for the prefix counts of partitioned scans.

theta is carried in two forms.  ``theta_exact`` sums mpmath logarithms with a
compensated accumulator at ``precision + 10`` digits.  The range verifiers use
a fixed-point integer representation instead: every ``ln p`` is rounded to a
multiple of ``2**-THETA_FRAC_BITS`` and the integers are summed exactly, so the
result is independent of how the range was partitioned and carries an explicit
error bound (``theta_fixed_error``).
"""
from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterator, Sequence

import numpy as np
from mpmath import mp, mpf

from .errors import CapacityError
from .widereal import NeumaierSum, check_precision

CACHE_MAGIC = b"PGATE1"
THETA_FRAC_BITS = 31
THETA_SCALE = 1 << THETA_FRAC_BITS
# Fixed-point theta must fit in int64: 1.01 * x * 2**31 < 2**63.
THETA_CAPACITY = 4_200_000_000
# numpy's float64 log is observed within 0.5 ulp; budget 4.
LOG_ULPS = 4

DEFAULT_SIEVE_LIMIT = 10**9
DEFAULT_SUBLINEAR_LIMIT = 10**12
DEFAULT_SEGMENT = 1 << 22  # odd entries per segment


def simple_sieve(n: int) -> np.ndarray:
    """All primes <= n as int64 (plain, unsegmented)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    is_p[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if is_p[p]:
            is_p[p * p :: 2 * p] = False
    return np.flatnonzero(is_p).astype(np.int64)


# --- base-prime disk cache -------------------------------------------------

def write_cache(path: str | os.PathLike, limit: int, primes: np.ndarray) -> None:
    """Store the primes <= limit as an odd-only bitset (bit i <-> 2i+1)."""
    nbits = (limit + 1) // 2
    bits = np.zeros(nbits, dtype=bool)
    odd = primes[primes > 2]
    bits[(odd - 1) // 2] = True
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<Q", limit))
        fh.write(np.packbits(bits, bitorder="little").tobytes())
    os.replace(tmp, path)


def read_cache(path: str | os.PathLike) -> tuple[int, np.ndarray]:
    """Inverse of ``write_cache``; returns ``(limit, primes)``."""
    with open(path, "rb") as fh:
        head = fh.read(len(CACHE_MAGIC) + 8)
        if len(head) != len(CACHE_MAGIC) + 8 or head[: len(CACHE_MAGIC)] != CACHE_MAGIC:
            raise ValueError(f"{path}: not a PGATE1 prime cache")
        (limit,) = struct.unpack("<Q", head[len(CACHE_MAGIC):])
        raw = np.frombuffer(fh.read(), dtype=np.uint8)
    nbits = (limit + 1) // 2
    if raw.size * 8 < nbits:
        raise ValueError(f"{path}: truncated bitset")
    bits = np.unpackbits(raw, bitorder="little")[:nbits].astype(bool)
    odd = 2 * np.flatnonzero(bits).astype(np.int64) + 1
    primes = odd if limit < 2 else np.concatenate([np.array([2], dtype=np.int64), odd])
    return int(limit), primes


# --- segment sieve ---------------------------------------------------------

def _sieve_odd(lo: int, hi: int, base_odd: Sequence[int]) -> np.ndarray:
    """Primality of the odd numbers in [lo, hi); entry j is the number (lo|1) + 2j."""
    o0 = lo | 1
    n = max(0, (hi - o0 + 1) // 2)
    mark = np.ones(n, dtype=bool)
    if n == 0:
        return mark
    for p in base_odd:
        pp = p * p
        if pp >= hi:
            break
        start = max(pp, -(-o0 // p) * p)
        if not start & 1:
            start += p
        mark[(start - o0) >> 1 :: p] = False
    if o0 == 1:
        mark[0] = False
    return mark


def log_fixed(primes: np.ndarray) -> np.ndarray:
    """``round(ln p * 2**THETA_FRAC_BITS)`` as int64."""
    return np.rint(np.log(primes.astype(np.float64)) * THETA_SCALE).astype(np.int64)


def theta_fixed_error(n_terms: int, x: float) -> float:
    """Bound on |fixed-point theta - theta| after ``n_terms`` primes <= x."""
    if n_terms == 0:
        return 0.0
    per_term = LOG_ULPS * math.log(max(x, 2.0)) * 2.0**-52 + 2.0 ** -(THETA_FRAC_BITS + 1)
    return n_terms * per_term


@dataclass
class PrimeBlock:
    """A sieved segment [lo, hi) chained to its predecessors.

    ``pi_at_lo`` is pi(lo - 1).  ``theta_fx_at_lo`` is the fixed-point
    theta(lo - 1) (``None`` when the block was built without theta data).
    """

    lo: int
    hi: int
    odd: np.ndarray
    pi_at_lo: int
    theta_fx_at_lo: int | None = None
    _primes: np.ndarray | None = field(default=None, repr=False)

    @property
    def has_two(self) -> bool:
        return self.lo <= 2 < self.hi

    @property
    def primes(self) -> np.ndarray:
        if self._primes is None:
            odd = (self.lo | 1) + 2 * np.flatnonzero(self.odd).astype(np.int64)
            if self.has_two:
                odd = np.concatenate([np.array([2], dtype=np.int64), odd])
            self._primes = odd
        return self._primes

    @property
    def count(self) -> int:
        return int(self.odd.sum()) + int(self.has_two)

    @property
    def bits(self) -> np.ndarray:
        """Dense primality bitset: ``bits[k]`` is True iff ``lo + k`` is prime."""
        out = np.zeros(self.hi - self.lo, dtype=bool)
        out[self.primes - self.lo] = True
        return out

    def is_prime(self, n: int) -> bool:
        if not self.lo <= n < self.hi:
            raise IndexError(f"{n} outside block [{self.lo}, {self.hi})")
        if n == 2:
            return True
        if n % 2 == 0:
            return False
        return bool(self.odd[(n - (self.lo | 1)) >> 1])

    @property
    def theta_fx_sum(self) -> int:
        return int(log_fixed(self.primes).sum())

    @property
    def theta_at_lo(self):
        """theta(lo - 1) as a WideReal, accurate to ``theta_fixed_error``."""
        if self.theta_fx_at_lo is None:
            return None
        return mpf(self.theta_fx_at_lo) / THETA_SCALE

    @property
    def pi_at_hi(self) -> int:
        return self.pi_at_lo + self.count


@dataclass(frozen=True)
class PiSnapshot:
    x: int
    pi: int
    method: str  # "sieve" | "sublinear"


# --- sublinear counting ----------------------------------------------------

@lru_cache(maxsize=256)
def lucy_pi(x: int) -> int:
    """pi(x) by the Legendre-type recursion on the floor values of x.

    S(v, p) = S(v, p-1) - (S(v // p, p-1) - S(p-1, p-1)) removes the numbers
    whose least prime factor is p; after every prime p <= sqrt(x) has been
    processed S(v) = pi(v) for every v of the form x // k.
    """
    x = int(x)
    if x < 2:
        return 0
    r = math.isqrt(x)
    small = np.arange(-1, r, dtype=np.int64)  # small[v] = v - 1
    idx = np.arange(0, r + 1, dtype=np.int64)
    large = np.zeros(r + 1, dtype=np.int64)
    large[1:] = x // idx[1:] - 1  # large[i] = S(x // i)
    for p in range(2, r + 1):
        if small[p] == small[p - 1]:
            continue
        sp = small[p - 1]
        p2 = p * p
        lim = min(r, x // p2)
        k = min(lim, r // p)
        upd = np.empty(lim, dtype=np.int64)
        upd[:k] = large[p : k * p + 1 : p]
        if lim > k:
            upd[k:] = small[x // (idx[k + 1 : lim + 1] * p)]
        large[1 : lim + 1] -= upd - sp
        if p2 <= r:
            small[p2:] -= small[idx[p2:] // p] - sp
    return int(large[1])


def legendre_pi(x: int) -> int:
    """pi(x) = phi(x, a) + a - 1 with a = pi(sqrt x); slow, memoised, small x only."""
    if x < 2:
        return 0
    ps = simple_sieve(math.isqrt(x)).tolist()
    memo: dict[tuple[int, int], int] = {}

    def phi(v: int, a: int) -> int:
        if a == 0 or v == 0:
            return v
        key = (v, a)
        if key not in memo:
            memo[key] = phi(v, a - 1) - phi(v // ps[a - 1], a - 1)
        return memo[key]

    a = len(ps)
    return phi(x, a) + a - 1


# --- engine ----------------------------------------------------------------

def default_cache_path() -> Path:
    env = os.environ.get("PRIME_GATE_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "prime_gate" / "base_primes.pgate"


@dataclass
class PrimeEngine:
    sieve_limit: int = DEFAULT_SIEVE_LIMIT
    sublinear_limit: int = DEFAULT_SUBLINEAR_LIMIT
    segment_size: int = DEFAULT_SEGMENT
    cache_path: str | os.PathLike | None = None
    _base: np.ndarray | None = field(default=None, repr=False)
    _base_limit: int = field(default=0, repr=False)

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_base"] = None
        state["_base_limit"] = 0
        return state

    @property
    def span(self) -> int:
        return 2 * self.segment_size

    # base primes --------------------------------------------------------
    def base_primes(self, upto: int) -> np.ndarray:
        upto = max(int(upto), 2)
        if self._base is None or self._base_limit < upto:
            want = max(upto, math.isqrt(self.sieve_limit) + 1)
            primes = None
            if self.cache_path is not None:
                try:
                    lim, cached = read_cache(self.cache_path)
                    if lim >= want:
                        primes, want = cached, lim
                except (OSError, ValueError):
                    pass
            if primes is None:
                primes = simple_sieve(want)
                if self.cache_path is not None:
                    try:
                        write_cache(self.cache_path, want, primes)
                    except OSError:
                        pass
            self._base, self._base_limit = primes, want
        return self._base[self._base <= upto]

    def _check(self, hi: int) -> None:
        if hi - 1 > self.sieve_limit:
            raise CapacityError(
                f"range end {hi - 1} exceeds sieve limit {self.sieve_limit}; "
                "use pi_exact_sublinear for isolated counts or raise the limit"
            )

    # sieving ------------------------------------------------------------
    def sieve_range(self, lo: int, hi: int, pi_at_lo: int | None = None,
                    theta_fx_at_lo: int | None = None) -> PrimeBlock:
        lo, hi = int(lo), int(hi)
        if lo < 2 or hi <= lo:
            raise ValueError(f"need 2 <= lo < hi, got [{lo}, {hi})")
        if hi - lo > self.span:
            raise ValueError(f"block width {hi - lo} exceeds segment span {self.span}")
        self._check(hi)
        base = self.base_primes(math.isqrt(hi - 1) + 1)
        odd = _sieve_odd(lo, hi, base[1:].tolist())
        if pi_at_lo is None:
            pi_at_lo = lucy_pi(lo - 1)
        return PrimeBlock(lo, hi, odd, pi_at_lo, theta_fx_at_lo)

    def blocks(self, lo: int, hi: int, theta: bool = False) -> Iterator[PrimeBlock]:
        """Chained blocks covering [lo, hi).  ``theta=True`` also chains theta."""
        lo, hi = max(int(lo), 2), int(hi)
        if hi <= lo:
            return
        self._check(hi)
        pi0 = lucy_pi(lo - 1)
        th0 = self.theta_fixed(lo - 1) if theta else None
        a = lo
        while a < hi:
            b = min(a + self.span, hi)
            blk = self.sieve_range(a, b, pi0, th0)
            yield blk
            pi0 = blk.pi_at_hi
            if theta:
                th0 += blk.theta_fx_sum
            a = b

    def primes_between(self, lo: int, hi: int) -> np.ndarray:
        """Primes p with lo <= p < hi."""
        parts = [b.primes for b in self.blocks(lo, hi)]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def primes_upto(self, x: int) -> np.ndarray:
        return self.primes_between(2, int(x) + 1)

    # counting -----------------------------------------------------------
    def pi_exact_sieve(self, x: int) -> PiSnapshot:
        x = int(x)
        if x < 0:
            raise ValueError("x must be >= 0")
        if x > self.sieve_limit:
            raise CapacityError(f"x={x} above sieve limit {self.sieve_limit}; use pi_exact_sublinear")
        return PiSnapshot(x, self.pi_many_sieve([x])[x], "sieve")

    def pi_many_sieve(self, xs: Sequence[int]) -> dict[int, int]:
        """Exact pi at several points from one sieve pass (no sublinear prefix)."""
        xs = sorted({int(v) for v in xs})
        if xs and xs[-1] > self.sieve_limit:
            raise CapacityError(f"x={xs[-1]} above sieve limit {self.sieve_limit}")
        out = {v: 0 for v in xs if v < 2}
        want = [v for v in xs if v >= 2]
        if not want:
            return out
        top = want[-1] + 1
        count, a, i = 0, 2, 0
        while a < top:
            b = min(a + self.span, top)
            base = self.base_primes(math.isqrt(b - 1) + 1)
            odd = _sieve_odd(a, b, base[1:].tolist())
            blk = PrimeBlock(a, b, odd, count)
            ps = blk.primes
            while i < len(want) and want[i] < b:
                out[want[i]] = count + int(np.searchsorted(ps, want[i], side="right"))
                i += 1
            count += len(ps)
            a = b
        return out

    def pi_exact_sublinear(self, x: int) -> PiSnapshot:
        x = int(x)
        if x > self.sublinear_limit:
            raise CapacityError(f"x={x} above sublinear limit {self.sublinear_limit}")
        return PiSnapshot(x, lucy_pi(x), "sublinear")

    def pi(self, x: int) -> int:
        """Exact pi(x) by whichever method is cheaper."""
        x = int(x)
        if x < 2:
            return 0
        return self.pi_exact_sublinear(x).pi

    # theta --------------------------------------------------------------
    def theta_fixed(self, x: int) -> int:
        """Fixed-point theta(x) (units of 2**-THETA_FRAC_BITS)."""
        x = int(x)
        if x < 2:
            return 0
        if x > THETA_CAPACITY:
            raise CapacityError(f"fixed-point theta limited to x <= {THETA_CAPACITY}")
        self._check(x + 1)
        total, a = 0, 2
        while a <= x:
            b = min(a + self.span, x + 1)
            base = self.base_primes(math.isqrt(b - 1) + 1)
            blk = PrimeBlock(a, b, _sieve_odd(a, b, base[1:].tolist()), 0)
            total += blk.theta_fx_sum
            a = b
        return total

    def theta_exact(self, x: int, precision: int = 30):
        """theta(x) = sum of ln p over p <= x, compensated at precision + 10 digits."""
        check_precision(precision)
        x = int(x)
        if x < 2:
            raise ValueError("theta_exact needs x >= 2")
        self._check(x + 1)
        with mp.workdps(precision + 10):
            acc = NeumaierSum()
            for blk in self.blocks(2, x + 1):
                for p in blk.primes.tolist():
                    acc.add(mp.log(p))
            val = acc.value
        with mp.workdps(precision):
            return +val

    def nth_prime(self, n: int) -> int:
        n = int(n)
        if n < 1:
            raise ValueError("n must be >= 1")
        if n < 6:
            return (2, 3, 5, 7, 11)[n - 1]
        ub = int(n * (math.log(n) + math.log(math.log(n)))) + 1
        if ub > self.sieve_limit:
            raise CapacityError(f"p_{n} may exceed sieve limit {self.sieve_limit}")
        for blk in self.blocks(2, ub + 1):
            if blk.pi_at_hi >= n:
                return int(blk.primes[n - blk.pi_at_lo - 1])
        raise AssertionError("prime bound violated")  # pragma: no cover


_DEFAULT = PrimeEngine()


def default_engine() -> PrimeEngine:
    return _DEFAULT


def sieve_range(lo: int, hi: int) -> PrimeBlock:
    return _DEFAULT.sieve_range(lo, hi)


def pi_exact_sieve(x: int) -> PiSnapshot:
    return _DEFAULT.pi_exact_sieve(x)


def pi_exact_sublinear(x: int) -> PiSnapshot:
    return _DEFAULT.pi_exact_sublinear(x)


def theta_exact(x: int, precision: int = 30):
    return _DEFAULT.theta_exact(x, precision)


def nth_prime(n: int) -> int:
    return _DEFAULT.nth_prime(n)


# --- partitioning ----------------------------------------------------------

def partition(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    """Split [lo, hi) into ``parts`` contiguous, nearly equal half-open pieces."""
    parts = max(1, min(int(parts), hi - lo))
    edges = [lo + (hi - lo) * k // parts for k in range(parts + 1)]
    return [(edges[k], edges[k + 1]) for k in range(parts)]


def map_ordered(fn: Callable, args: Sequence, jobs: int = 1) -> list:
    """``[fn(*a) for a in args]``, optionally in worker processes; order preserved."""
    if jobs <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, *zip(*args)))


def theta_fixed_between(engine: PrimeEngine, lo: int, hi: int) -> tuple[int, int]:
    """(prime count, fixed-point theta sum) over the primes in [lo, hi)."""
    count = total = 0
    for blk in engine.blocks(lo, hi):
        count += blk.count
        total += blk.theta_fx_sum
    return count, total
