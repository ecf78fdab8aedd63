import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from prime_gate.errors import CapacityError
from prime_gate.primes import (THETA_SCALE, PrimeEngine, legendre_pi, log_fixed, lucy_pi, partition,
                               read_cache, simple_sieve, theta_fixed_between, theta_fixed_error,
                               write_cache)


def naive_primes(n):
    return [k for k in range(2, n + 1) if all(k % d for d in range(2, math.isqrt(k) + 1))]


def test_simple_sieve_small():
    assert simple_sieve(1).tolist() == []
    assert simple_sieve(2).tolist() == [2]
    assert simple_sieve(100).tolist() == naive_primes(100)


@pytest.mark.parametrize("lo,hi", [(2, 3), (2, 1000), (10, 11), (1000, 5000), (999_983, 1_000_100)])
def test_sieve_range_matches_naive(engine, lo, hi):
    blk = engine.sieve_range(lo, hi)
    expect = [p for p in simple_sieve(hi - 1).tolist() if p >= lo]
    assert blk.primes.tolist() == expect
    assert blk.pi_at_hi == len(simple_sieve(hi - 1))
    bits = blk.bits
    assert [lo + k for k in np.flatnonzero(bits)] == expect


def test_blocks_chain_across_segments():
    eng = PrimeEngine(segment_size=1 << 10)
    blocks = list(eng.blocks(2, 50_000))
    assert len(blocks) > 10
    for a, b in zip(blocks, blocks[1:]):
        assert a.hi == b.lo and a.pi_at_hi == b.pi_at_lo
    assert blocks[-1].pi_at_hi == 5133


@pytest.mark.parametrize("x,pi", [(0, 0), (1, 0), (2, 1), (10, 4), (6400, 834), (10**6, 78498),
                                  (10**8, 5761455)])
def test_known_pi(engine, x, pi):
    assert engine.pi(x) == pi
    if x <= 10**6:
        assert engine.pi_exact_sieve(x).pi == pi


@pytest.mark.parametrize("x,pi", [(10**10, 455052511), (38358837677, 1644673232)])
def test_lucy_known_large(x, pi):
    assert lucy_pi(x) == pi


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=200_000))
def test_lucy_matches_legendre_and_sieve(x):
    assert lucy_pi(x) == legendre_pi(x) == len(simple_sieve(x))


def test_pi_many_sieve_single_pass(engine):
    xs = [1, 100, 6400, 10**5, 999_999]
    got = engine.pi_many_sieve(xs)
    assert got == {x: len(simple_sieve(x)) for x in xs}


def test_capacity_errors():
    eng = PrimeEngine(sieve_limit=10**4, sublinear_limit=10**6)
    with pytest.raises(CapacityError):
        eng.pi_exact_sieve(10**5)
    with pytest.raises(CapacityError):
        eng.pi_exact_sublinear(10**7)
    with pytest.raises(CapacityError):
        list(eng.blocks(2, 10**5))


def test_nth_prime(engine):
    assert [engine.nth_prime(n) for n in range(1, 8)] == [2, 3, 5, 7, 11, 13, 17]
    assert engine.nth_prime(834) == 6397
    assert engine.nth_prime(78498) == 999983


def test_cache_roundtrip(tmp_path):
    path = tmp_path / "c.pgate"
    ps = simple_sieve(10_000)
    write_cache(path, 10_000, ps)
    lim, back = read_cache(path)
    assert lim == 10_000 and back.tolist() == ps.tolist()
    path.write_bytes(b"garbage")
    with pytest.raises(ValueError):
        read_cache(path)


def test_engine_uses_env_cache(tmp_path, monkeypatch):
    from prime_gate.primes import default_cache_path
    monkeypatch.setenv("PRIME_GATE_CACHE", str(tmp_path / "env.pgate"))
    assert default_cache_path() == tmp_path / "env.pgate"
    eng = PrimeEngine(sieve_limit=10**6, cache_path=default_cache_path())
    eng.base_primes(1000)
    assert (tmp_path / "env.pgate").exists()
    eng2 = PrimeEngine(sieve_limit=10**6, cache_path=default_cache_path())
    assert eng2.base_primes(1000).tolist() == simple_sieve(1000).tolist()


def test_theta_exact_against_naive(engine):
    with mp.workdps(40):
        naive = mp.fsum(mp.log(p) for p in naive_primes(6400))
    got = engine.theta_exact(6400, 30)
    assert abs(got - naive) < mpf(10) ** -25
    assert got < 6400


def test_theta_fixed_within_error(engine):
    x = 200_000
    fx = engine.theta_fixed(x)
    exact = engine.theta_exact(x, 30)
    n = engine.pi(x)
    assert abs(mpf(fx) / THETA_SCALE - exact) <= theta_fixed_error(n, x)


def test_theta_fixed_partition_independent(engine):
    lo, hi = 2, 3_000_000
    whole = theta_fixed_between(engine, lo, hi)
    parts = [theta_fixed_between(engine, a, b) for a, b in partition(lo, hi, 7)]
    assert whole == (sum(c for c, _ in parts), sum(s for _, s in parts))


def test_log_fixed_rounding():
    ps = simple_sieve(1000)
    fx = log_fixed(ps)
    err = np.abs(fx / THETA_SCALE - np.log(ps.astype(float)))
    assert err.max() <= 2.0**-32 + 1e-15


def test_partition_covers():
    pieces = partition(10, 1000, 16)
    assert pieces[0][0] == 10 and pieces[-1][1] == 1000
    assert all(a[1] == b[0] for a, b in zip(pieces, pieces[1:]))
