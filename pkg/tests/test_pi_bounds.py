import math

import pytest
from mpmath import mp, mpf

from prime_gate.errors import DomainError
from prime_gate.pi_bounds import (H, beta, check_alpha_scaling, check_beta_below_6400, check_H_at_primes,
                                  check_subadditivity, check_thm1, cubic_predicate_check, pi_lower, pi_upper)


@pytest.mark.parametrize("x,lo,up", [(59, "16.5138", "22.8477"), (6400, "789.94", "861.81")])
def test_bound_values(x, lo, up):
    assert abs(pi_lower(x) / mpf(lo) - 1) < 1e-5
    assert abs(pi_upper(x) / mpf(up) - 1) < 1e-5


def test_bound_domains():
    with pytest.raises(DomainError):
        pi_lower(58)
    with pytest.raises(DomainError):
        pi_upper(5)


def test_thm1_integer_breakpoints(engine):
    r = check_thm1(59, 10**6, engine=engine)
    assert r.holds
    assert r.witness == 66 and abs(r.worst_margin - mpf("0.0565")) < 1e-3


def test_thm1_fails_just_below_67(engine):
    # the lower bound exceeds pi(x) = 18 on (66.2793..., 67)
    r = check_thm1(59, 1000, engine=engine, real_limits=True)
    assert not r.holds
    assert r.witness == 67 and r.witness_side == "left"
    with mp.workdps(30):
        assert pi_lower(mpf("66.99")) > 18
        assert pi_lower(mpf("66.27")) < 18


def test_thm1_partition_independent(engine):
    a = check_thm1(59, 2 * 10**6, engine=engine)
    b = check_thm1(59, 2 * 10**6, engine=engine, parts=8)
    assert (a.worst_margin, a.witness) == (b.worst_margin, b.witness)


def test_H_and_beta_values(engine):
    assert H(7, engine=engine) > 0
    with pytest.raises(DomainError):
        H(6)
    with pytest.raises(DomainError):
        beta(6400)
    assert beta(58, engine=engine, check_domain=False) < 0


def test_H_at_primes(engine):
    r = check_H_at_primes(engine=engine)
    assert r.holds
    assert r.witness == 59797
    assert r.details["reduced_witness"] == 24137


def test_beta_report(engine):
    r = check_beta_below_6400(engine=engine)
    assert r.holds
    d = r.details
    assert d["printed_form_truth_set"] == []
    assert not d["printed_form_matches_n_ge_36"]
    assert d["reduced_form_n_threshold"] == 36
    assert not d["left_limit_holds"] and d["left_limit_witness"] == 67


def test_alpha_scaling(engine):
    assert check_alpha_scaling(2, 4128, 10**5, engine=engine).holds
    assert check_alpha_scaling(math.exp(0.25), 364, 10**5, domain="small-alpha", engine=engine).holds
    bad = check_alpha_scaling(1.1, 2, 1000, domain="none", engine=engine)
    assert not bad.holds
    with pytest.raises(DomainError):
        check_alpha_scaling(2, 100, 1000, engine=engine)


def test_subadditivity(engine):
    thr = math.exp(9)
    r = check_subadditivity(1.0, [int(thr) + 1, 10**5, 10**6], engine=engine)
    assert r.holds
    with pytest.raises(DomainError):
        check_subadditivity(1.0, [1000], engine=engine)
    with pytest.raises(DomainError):
        check_subadditivity(1.5, [10**5], engine=engine)


def test_cubic_predicate():
    r = cubic_predicate_check(points=10**5, direct_points=200)
    assert r.holds and r.details["agrees_with_direct_form"]
