import json
from pathlib import Path

import numpy as np
import pytest
from mpmath import mp, mpf

from prime_gate import scanner
from prime_gate.errors import CapacityError
from prime_gate.highprec import _g_from_counts, floor_div_e
from prime_gate.primes import PrimeEngine, simple_sieve
from prime_gate.scanner import ScanResult, check_point, fast_path, merge_runs, scan_exhaustive

GOLDEN = Path(__file__).parent / "data" / "scan_golden_1e6.json"


def naive_violations(lo, hi):
    ps = simple_sieve(hi)
    bad = []
    with mp.workdps(40):
        for x in range(lo, hi + 1):
            px = int(np.searchsorted(ps, x, side="right"))
            m = int(mp.floor(x / mp.e))
            pm = int(np.searchsorted(ps, m, side="right"))
            if mpf(px) ** 2 - mp.e * x / mp.log(x) * pm >= 0:
                bad.append(x)
    return merge_runs([[x, x] for x in bad])


def test_small_range_matches_naive(engine):
    res = scan_exhaustive(2, 1000, engine=engine)
    assert res.violations == naive_violations(2, 1000)
    assert res.points == 999
    assert res.violations[0] == [2, 5]


def test_golden_file(engine):
    gold = json.loads(GOLDEN.read_text())
    res = scan_exhaustive(2, 10**6, engine=engine)
    assert res.violations == gold["violations"]
    assert res.largest_violation == gold["largest_violation"] == 926721
    assert res.violation_count == gold["violation_count"]


def test_every_violation_rechecked(engine):
    res = scan_exhaustive(2, 10**5, engine=engine)
    assert res.points_rechecked_at_high_precision >= res.violation_count


def test_partition_independence(engine):
    a = scan_exhaustive(10**6, 2 * 10**6, engine=engine)
    b = scan_exhaustive(10**6, 2 * 10**6, engine=engine, parts=16)
    assert a.same_violations(b) and a.violation_count == b.violation_count


def test_run_endpoints_straddle_sign_change(engine):
    res = scan_exhaustive(2, 10**5, engine=engine)
    for a, b in res.violations[1:40]:
        assert check_point(a, engine=engine).sign > 0 and check_point(b, engine=engine).sign > 0
        assert check_point(a - 1, engine=engine).sign < 0
        assert check_point(b + 1, engine=engine).sign < 0


def test_fast_path_sound_on_random_points():
    rng = np.random.default_rng(11)
    top = 10**7
    ps = simple_sieve(top)
    xs = np.sort(rng.integers(2, top, 10**5))
    pi_x = np.searchsorted(ps, xs, side="right").astype(np.int64)
    ms = np.array([floor_div_e(x) for x in xs.tolist()], dtype=np.int64)
    pi_m = np.searchsorted(ps, ms, side="right").astype(np.int64)
    g, env = fast_path(xs, pi_x, pi_m)
    sure = np.abs(g) > env
    idx = np.flatnonzero(sure)[::20]
    for k in idx.tolist():
        exact = _g_from_counts(int(xs[k]), int(pi_x[k]), int(ms[k]), int(pi_m[k]), 60)
        assert (exact.g > 0) == (g[k] > 0)
    assert sure.mean() > 0.999


def test_checkpoint_resume(tmp_path, monkeypatch, engine):
    ck = tmp_path / "state.json"
    whole = scan_exhaustive(2, 50_000, engine=engine)
    calls = {"n": 0}
    real = scanner._scan_part

    def flaky(*a):
        calls["n"] += 1
        if calls["n"] == 3:
            raise KeyboardInterrupt
        return real(*a)

    monkeypatch.setattr(scanner, "_scan_part", flaky)
    with pytest.raises(KeyboardInterrupt):
        scan_exhaustive(2, 50_000, engine=engine, checkpoint=ck, checkpoint_every=10_000)
    state = json.loads(ck.read_text())
    assert state["next"] == 20_002
    monkeypatch.setattr(scanner, "_scan_part", real)
    resumed = scan_exhaustive(2, 50_000, engine=engine, checkpoint=ck, checkpoint_every=10_000)
    assert resumed.same_violations(whole) and resumed.points == whole.points


def test_outputs(engine):
    res = scan_exhaustive(2, 100, engine=engine)
    d = json.loads(res.to_json())
    assert d["violations"][0] == [2, 5]
    assert res.to_csv().splitlines()[:2] == ["start,end", "2,5"]
    assert ScanResult.from_dict(d).violations == res.violations


def test_capacity_and_range():
    eng = PrimeEngine(sieve_limit=10**5)
    with pytest.raises(CapacityError):
        scan_exhaustive(2, 10**6, engine=eng)
    with pytest.raises(ValueError):
        scan_exhaustive(1, 10)


def test_check_point_cases(engine):
    c = check_point(2, engine=engine)
    assert c.pi_x == 1 and c.pi_x_over_e == 0 and c.g == 1 and c.status == "violation"
    c = check_point(100, engine=engine)
    assert c.sign < 0 and c.status == "holds"
    c = check_point(10**8, engine=engine)
    assert c.sign < 0 and c.pi_x == 5761455
    g = check_point(38358837677, engine=engine)
    assert g.sign > 0 and g.pi_x == 1644673232 and abs(g.g) > g.error_bound
