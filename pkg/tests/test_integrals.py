import math

import pytest
from mpmath import mp, mpf

from prime_gate.errors import DomainError
from prime_gate.integrals import (check_integral_budget, composite_upper, convex_upper_sum, e_power_pieces,
                                  h1, h1_derivative, h1_exact, h1_sign_check, h2, h2_derivative, h2_exact,
                                  h2_sign_check, quad_integral, simpson_oracle)


def test_single_step_closed_form():
    r = convex_upper_sum("inv_log_cubed", 2, 3, 1, method="exact")
    with mp.workdps(30):
        assert abs(r.upper_bound - (1 / mp.log(2) ** 3 + 1 / mp.log(3) ** 3)) < mpf(10) ** -25


@pytest.mark.parametrize("u", ["inv_log_cubed", "inv_log_3_5"])
@pytest.mark.parametrize("a,b", [(2, 5), (10, 1000), (math.e**5, math.e**6)])
def test_fast_and_exact_are_upper_bounds(u, a, b):
    true = quad_integral(u, a, b)
    fast = convex_upper_sum(u, a, b, 200).upper_bound
    exact = convex_upper_sum(u, a, b, 200, method="exact").upper_bound
    assert fast >= exact >= true
    assert fast / exact - 1 < 1e-11


def test_bound_tightens_with_n():
    ub = [convex_upper_sum("inv_log_cubed", 2, 100, n).upper_bound for n in (10, 100, 1000)]
    assert ub[0] > ub[1] > ub[2] > quad_integral("inv_log_cubed", 2, 100)


def test_pieces():
    ps = e_power_pieces(2, math.exp(4.5))
    assert len(ps) == 5  # [2, e], [e, e^2], ..., [e^4, e^4.5]
    assert all(abs(a1 - b0) == 0 for (_, b0), (a1, _) in zip(ps, ps[1:]))


def test_integral_budget_values():
    x = math.exp(18.25)
    quad = quad_integral("inv_log_cubed", 2, x)
    assert abs(quad - mpf("16869.6384")) < 1e-3
    assert abs(simpson_oracle("inv_log_cubed", 2, x) / float(quad) - 1) < 1e-9
    ub = composite_upper("inv_log_cubed", 2, x, 10**5).upper_bound
    assert quad <= ub < 16870
    # a coarser grid is still an upper bound but no longer below the cap
    coarse = check_integral_budget(n=10**4)
    assert not coarse.holds and coarse.details["above_quadrature"]


def test_h1_h2_signs():
    r1 = h1_sign_check()
    assert r1.holds and r1.details["integral_below_16870"]
    assert abs(r1.details["three_times_leading"] - mpf("118507.85")) < 0.01
    r2 = h2_sign_check(n=10**4)
    assert r2.holds and abs(r2.details["leading"] - mpf("149.196")) < 1e-3


def test_h_domains():
    with pytest.raises(DomainError):
        h1(10**6)
    with pytest.raises(DomainError):
        h2(3999)
    with pytest.raises(DomainError):
        h2(1e8)


def test_h2_at_4000_and_monotone():
    v = h2(4000, n=10**3)
    assert v < 0  # the monotonicity argument starts at e^11, not at 4000
    assert h2_derivative(3800) > 0 > h2_derivative(3790)


@pytest.mark.parametrize("f,df,x", [(h1_exact, h1_derivative, math.exp(19)),
                                    (h2_exact, h2_derivative, 10**5)])
def test_derivative_against_finite_difference(f, df, x):
    with mp.workdps(40):
        h = mpf(x) * mpf(10) ** -8
        fd = (f(x + h, 40) - f(x - h, 40)) / (2 * h)
        assert abs(fd - df(x, 40)) < mpf(10) ** -9


def test_h1_derivative_sign_condition():
    # h1' > 0 iff 2u - 7 sqrt(u) - 5 > 0 with u = log x
    for u in (16.0, 17.0, 18.25, 25.0):
        d = h1_derivative(mp.exp(u))
        assert (d > 0) == (2 * u - 7 * math.sqrt(u) - 5 > 0)


def test_unknown_integrand():
    with pytest.raises(ValueError):
        convex_upper_sum("sin", 2, 3, 1)
