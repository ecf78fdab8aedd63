import math

import numpy as np
import pytest
from mpmath import mp, mpf

from prime_gate.errors import DomainError, PrecisionError
from prime_gate.highprec import (TABLE1_REF, TABLE1_T, floor_div_e, g_asymptotic, g_exact, monotonicity_scan,
                                 plot_csv, plot_rows, pnt5, table_emit, verify_eq31)
from prime_gate.primes import lucy_pi
from prime_gate.scanner import scan_exhaustive


def test_pnt5_closed_form():
    with mp.workdps(50):
        t = mpf(49)
        assert abs(pnt5(49, 50) - (1 / t + 1 / t**2 + 2 / t**3 + 6 / t**4 + 24 / t**5)) < mpf(10) ** -50
    with pytest.raises(DomainError):
        pnt5(1)


def test_pnt5_leading_term():
    assert abs(10**6 * pnt5(10**6) - 1) < 2e-6


def test_pnt5_against_exact_count():
    with mp.workdps(30):
        x = int(mp.floor(mp.exp(20)))
        approx = mp.exp(20) * pnt5(20, 30)
        rel = abs(approx / lucy_pi(x) - 1)
    # next term of the series is 5!/20^6 relative to 1/20
    assert rel < 120 / 20**5


@pytest.mark.parametrize("t,ref", list(zip(TABLE1_T, TABLE1_REF))[::5])
def test_li_model_reproduces_reference_rows(t, ref):
    v = g_asymptotic(t)
    assert v.render() == ref
    assert abs(v.g / mpf(ref) - 1) < 5e-7


def test_pnt5_model_misses_reference():
    # the five-term series is a coarser model; recorded as a finding
    v = g_asymptotic("49", model="pnt5")
    assert abs(v.g / mpf(TABLE1_REF[1]) - 1) > 0.1


@pytest.mark.parametrize("model", ["li", "pnt5"])
def test_log_neg_g_identity(model):
    for t in ("43.5102147", "500", "3159"):
        v = g_asymptotic(t, model=model)
        with mp.workdps(60):
            assert abs(mp.exp(v.log_neg_g) / -v.g - 1) < mpf(10) ** -55


@pytest.mark.parametrize("t", [20, 37.5, 64, 100])
def test_reduction_matches_unreduced(t):
    v = g_asymptotic(t, 60, model="pnt5")
    with mp.workdps(120):
        tt = mpf(t)
        S = lambda s: mp.fsum(mp.factorial(k) / s ** (k + 1) for k in range(5))
        full = (mp.exp(tt) * S(tt)) ** 2 - (mp.exp(tt + 1) / tt) * (mp.exp(tt - 1) * S(tt - 1))
        assert abs(v.g / full - 1) < mpf(10) ** -55


def test_precision_doubling_agrees():
    for t in TABLE1_T[::7]:
        a, b = g_asymptotic(t, 40).g, g_asymptotic(t, 80).g
        with mp.workdps(90):
            assert abs(a / b - 1) < mpf(10) ** (12 - 40)


def test_precision_cap():
    with pytest.raises(PrecisionError):
        g_asymptotic(3159, 30, max_precision=40)
    with pytest.raises(DomainError):
        g_asymptotic(19)


def test_floor_div_e():
    assert floor_div_e(100) == 36
    assert floor_div_e(2) == 0
    assert floor_div_e(38358837677) == 14111427768
    for x in np.random.default_rng(1).integers(2, 10**15, 200).tolist():
        with mp.workdps(60):
            assert floor_div_e(x) == int(mp.floor(x / mp.e))


def test_g_exact_small():
    v = g_exact(100)
    with mp.workdps(60):
        assert abs(v.g - (625 - 100 * mp.e / mp.log(100) * 11)) < mpf(10) ** -50
    assert v.g < 0 and v.details["pi_x_over_e"] == 11
    assert g_exact(2).g == 1


def test_g_exact_galway():
    v = g_exact(38358837677)
    assert v.g > 0
    assert v.details["pi_x"] == 1644673232


@pytest.mark.parametrize("model", ["li", "pnt5"])
def test_exact_and_asymptotic_signs(model):
    # on a log grid in [1e6, 1e9] both smooth models stay negative; the exact
    # G is positive at two grid points, and those are genuine violations
    disagree, positive = [], []
    for x in np.unique(np.logspace(6, 9, 13).astype(np.int64)).tolist():
        ex = g_exact(x)
        asy = g_asymptotic(mp.log(x), model=model, check_regime=False)
        assert asy.g < 0
        if ex.sign != asy.sign:
            disagree.append(x)
        if ex.g >= 0:
            positive.append(x)
    assert disagree == positive == [17782794, 177827941]
    for x in positive:
        res = scan_exhaustive(x - 50, x + 50)
        assert any(a <= x <= b for a, b in res.violations)


def test_table_emit_default_grid():
    rows = table_emit()
    assert len(rows) == 34
    assert all(r.within_tol for r in rows)
    assert rows[8].rendered == "-3.1339236e555"


def test_table_emit_custom_grid():
    rows = table_emit([25, "659"])
    assert rows[0].reference is None and rows[1].reference == "-3.1339236e555"
    with pytest.raises(DomainError):
        table_emit([10])


def test_monotonicity_small_grid():
    r = monotonicity_scan(steps=200)
    assert r.holds and r.details["all_negative"]


def test_degenerate_grid():
    with pytest.raises(ValueError):
        monotonicity_scan(100, 100, 10)
    with pytest.raises(ValueError):
        monotonicity_scan(100, 200, 1)


def test_plot_csv_format():
    rows = plot_rows(43, 3159, 5)
    text = plot_csv(rows).splitlines()
    assert text[0] == "t,log_neg_g"
    vals = [float(line.split(",")[1]) for line in text[1:]]
    assert len(vals) == 5 and all(b > a for a, b in zip(vals, vals[1:]))


def test_verify_eq31():
    ok, cert = verify_eq31(43)
    assert ok and cert["in_support"]
    ok, cert = verify_eq31(math.log(59))
    assert ok and cert["in_support"]
    ok, cert = verify_eq31(1.0001)
    assert ok and not cert["in_support"]
    with pytest.raises(DomainError):
        verify_eq31(1)
