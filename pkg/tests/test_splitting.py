import math

import numpy as np
import pytest
from mpmath import mp, mpf

from prime_gate.errors import DomainError
from prime_gate.splitting import (admissible, derive_x0, dominance_check, grid_oracle, log_thresholds,
                                  optimize_a, thresholds)


def test_reference_constant():
    th = thresholds("1.359")
    assert abs(th.eps - mpf("0.999792663")) < 1e-9
    assert abs(mp.e / (mp.e - th.a) - mpf("1.999792664")) < 1e-9
    assert abs(9 / th.eps**2 - mpf("9.003733214")) < 1e-9
    assert abs(th.logs[1] / mpf("43.5102146") - 1) < 1e-7
    assert abs(th.logs[2] / mpf("43.45280029") - 1) < 1e-7
    assert abs(th.log_x0 / mpf("43.5102147") - 1) < 1e-7
    assert th.selector == "T2"
    assert th.x0 == max(th.T1, th.T2, th.T3)


def test_x0_is_max_random():
    rng = np.random.default_rng(7)
    for a in rng.uniform(1.0001, math.e / 2 - 1e-9, 10**3):
        th = thresholds(float(a), 30)
        assert th.log_x0 == max(th.logs)
        with mp.workdps(30):
            assert abs(mp.log(th.x0) - th.log_x0) < mpf(10) ** -20


def test_symmetry():
    rng = np.random.default_rng(3)
    for a in rng.uniform(1.01, math.e - 1.01, 200):
        with mp.workdps(40):
            l = log_thresholds(a, 40)
            r = log_thresholds(mp.e - mpf(a), 40)
            assert abs(l[1] - r[2]) < mpf(10) ** -30


def test_half_e():
    with mp.workdps(40):
        l = log_thresholds(mp.e / 2, 40)
        assert abs(l[1] - l[2]) < mpf(10) ** -30
        assert abs(l[1] - mpf("43.4814914097")) < 1e-9
        assert abs(l[0] - (mp.log(2) + 9)) < mpf(10) ** -30


def test_admissibility():
    assert not admissible(1.0)
    assert not admissible(1.5)
    assert admissible("1.3591", "strict") and not admissible("1.3592", "inclusive")
    with mp.workdps(50):
        half = mp.e / 2
        assert not admissible(half, "strict")
        assert admissible(half, "inclusive")
    with pytest.raises(DomainError):
        thresholds(1.5)
    with pytest.raises(ValueError):
        admissible(1.2, "loose")


def test_t2_blows_up_near_one():
    assert log_thresholds(1 + 1e-6)[1] > 1e12


def test_optimize_inclusive():
    r = optimize_a(tol=1e-9)
    assert abs(r.a_star - mp.e / 2) < 1e-6
    assert abs(r.thresholds.log_x0 - mpf("43.4815")) < 1e-3
    assert r.attained and r.details["grid_agrees"]


def test_optimize_strict_not_attained():
    r = optimize_a(mode="strict", tol=1e-9)
    assert not r.attained
    assert r.a_star < mp.e / 2
    assert abs(r.infimum_log_x0 - mpf("43.4814914097")) < 1e-9


def test_optimize_boundary_interval():
    r = optimize_a(1.3, 1.35)
    assert r.a_star == mpf("1.35")
    a_grid, _ = grid_oracle(1.3, 1.35, 10**5)
    assert abs(a_grid - 1.35) < 1e-6


def test_optimize_stable_under_precision():
    a = optimize_a(tol=1e-10, precision=40).a_star
    b = optimize_a(tol=1e-10, precision=80).a_star
    assert abs(a - b) < 1e-9


def test_optimize_errors():
    with pytest.raises(DomainError):
        optimize_a(1.4, 1.5, mode="strict")
    with pytest.raises(ValueError):
        optimize_a(tol=0)


def test_dominance_fails_near_lower_end():
    # T1 exceeds T3 for a below ~1.1168, so the optimiser uses the full max
    r = dominance_check()
    assert not r.holds
    c = r.details["crossover_T1_T3"]
    assert 1.11 < c < 1.12
    l = log_thresholds(c)
    assert abs(l[0] - l[2]) < 1e-10
    assert dominance_check(1.12).holds


def test_derive_x0_certificate():
    th, chain = derive_x0()
    steps = [c["step"] for c in chain]
    assert steps == ["split", "subadditivity", "scaling-a", "scaling-e-minus-a", "combine",
                     "lower-bound", "gap-sign"]
    assert mpf(chain[1]["value"].split("=")[1].split("<")[0]) < 1
    assert chain[4]["selector"] == "T2"
    assert chain[-1]["holds"] is None
