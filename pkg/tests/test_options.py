import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from brownian_rays.core_process import RayParams, ray_cov
from brownian_rays.options import (
    GbrSpec,
    OptionContract,
    bsm_call,
    bsm_delta,
    bsm_price,
    gbr_sample_terminal,
    hedge_replicate,
    payoff,
    real_measure_discounted_payoff,
    theta_from_covariance,
)

CANON = OptionContract(strike=100.0, rate=0.05, maturity=1.0, spot=100.0)


def gbm_like(theta=0.04, big_delta=2.0, rho=0.0):
    # delta = 1e6*big_delta keeps tau negligible against theta
    delta = 1e6 * big_delta
    return GbrSpec(100.0, rho, RayParams(theta * delta, delta, big_delta))


@pytest.mark.parametrize("s,expected", [(105, 5), (95, 0), (100, 0)])
def test_payoff(s, expected):
    assert payoff(s, 100) == expected


def test_payoff_rejects_bad_strike():
    with pytest.raises(ValueError):
        payoff(1.0, 0.0)


def test_canonical_price():
    assert bsm_price(CANON, 0.04) == pytest.approx(10.4506, abs=5e-4)


def test_price_against_scipy_lognormal_expectation():
    # independent route: discounted risk-neutral expectation by quadrature
    s, c, r, h, th = 100.0, 95.0, 0.03, 0.7, 0.09
    dist = stats.lognorm(s=math.sqrt(th * h), scale=s * math.exp((r - th / 2) * h))
    expected = math.exp(-r * h) * dist.expect(lambda x: max(x - c, 0.0), lb=c)
    assert bsm_price(OptionContract(c, r, h, s), th) == pytest.approx(expected, rel=1e-8)


def test_deep_in_the_money():
    s = 1e6
    assert bsm_call(s, 100.0, 0.05, 1.0, 0.04) == pytest.approx(s - 100 * math.exp(-0.05), abs=1e-6 * s)


def test_expiry_continuity():
    assert bsm_call(105.0, 100.0, 0.05, 1e-12, 0.04) == pytest.approx(5.0, abs=1e-8)
    assert bsm_call(95.0, 100.0, 0.05, 1e-12, 0.04) == pytest.approx(0.0, abs=1e-8)
    assert bsm_call(105.0, 100.0, 0.05, 0.0, 0.04) == 5.0


@settings(max_examples=100, deadline=None)
@given(st.floats(50, 150), st.floats(0.01, 0.2), st.floats(0.1, 3), st.floats(0.001, 0.3))
def test_put_call_parity(s, r, h, th):
    # put by the mirrored formula, then parity back to the call
    root = math.sqrt(th * h)
    d1 = (math.log(s / 100) + (r + th / 2) * h) / root
    put = 100 * math.exp(-r * h) * stats.norm.cdf(-(d1 - root)) - s * stats.norm.cdf(-d1)
    call = bsm_price(OptionContract(100.0, r, h, s), th)
    assert call - put == pytest.approx(s - 100 * math.exp(-r * h), abs=1e-9 * s)


def test_price_monotone_in_inputs():
    spots = np.linspace(50, 150, 50)
    assert np.all(np.diff(bsm_call(spots, 100, 0.05, 1.0, 0.04)) > 0)
    thetas = np.linspace(0.01, 0.5, 20)
    prices = [bsm_price(CANON, t) for t in thetas]
    assert np.all(np.diff(prices) > 0)
    hs = np.linspace(0.1, 3, 20)
    assert np.all(np.diff(bsm_call(100.0, 100.0, 0.05, hs, 0.04)) > 0)


def test_delta_in_unit_interval_and_matches_slope():
    d = bsm_delta(CANON, 0.04)
    assert 0 < d < 1
    eps = 1e-4
    fd = (bsm_call(100 + eps, 100, 0.05, 1.0, 0.04) - bsm_call(100 - eps, 100, 0.05, 1.0, 0.04)) / (2 * eps)
    assert d == pytest.approx(fd, rel=1e-7)


def test_price_rejects_bad_theta_and_contract():
    with pytest.raises(ValueError):
        bsm_price(CANON, 0.0)
    with pytest.raises(ValueError):
        OptionContract(100.0, 0.05, 1.0, -1.0)


def test_price_depends_on_ray_only_through_theta():
    a = RayParams(0.08, 2.0, 1.0)  # theta 0.04
    b = RayParams(4.0, 100.0, 1.0)  # theta 0.04
    assert a.theta == pytest.approx(b.theta)
    assert bsm_price(CANON, a.theta) == bsm_price(CANON, b.theta)


# -- theta from covariances -------------------------------------------------


def test_theta_from_covariance_hand_value():
    _, form_b = theta_from_covariance(0.75, 1.0, r_uuh=0.5, big_h=1.0)
    assert form_b == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 10), st.floats(1.0, 100), st.floats(0.05, 0.5), st.floats(0.05, 0.4))
def test_theta_forms_agree_on_kernel(phi, ratio, u, big_h):
    p = RayParams(phi, ratio, 1.0)
    form_a, form_b = theta_from_covariance(
        ray_cov(p, u, u), u, tau=p.tau, r_uuh=ray_cov(p, u, u + big_h), big_h=big_h
    )
    assert form_a == pytest.approx(p.theta, rel=1e-10)
    assert form_b == pytest.approx(p.theta, rel=1e-9)
    # realised variance per unit time understates theta for any positive tau
    assert ray_cov(p, u, u) / u <= form_a


def test_theta_small_tau_limit():
    p = RayParams(0.04 * 1e9, 1e9, 1.0)
    form_a, _ = theta_from_covariance(ray_cov(p, 0.5, 0.5), 0.5, tau=p.tau)
    assert form_a == pytest.approx(ray_cov(p, 0.5, 0.5) / 0.5, rel=1e-9)


def test_theta_from_covariance_domain():
    with pytest.raises(ValueError):
        theta_from_covariance(1.0, 0.0, tau=0.1)
    with pytest.raises(ValueError):
        theta_from_covariance(1.0, 1.0, r_uuh=0.5)


# -- price dynamics ---------------------------------------------------------


def test_gbr_terminal_moments_gbm_limit():
    spec = gbm_like(theta=0.04, rho=0.01)
    x = np.log(gbr_sample_terminal(spec, 0.0, 0.0, 1.0, 50000, 3) / 100.0)
    assert abs(x.mean() - 0.01) < 5 * 0.2 / math.sqrt(50000)
    assert x.var() == pytest.approx(0.04, rel=0.03)


def test_gbr_conditioned_moments():
    spec = GbrSpec(100.0, 0.02, RayParams(0.5, 1.2, 1.0))
    u, x1, big_h = 0.3, 0.1, 0.5
    cond, rho_u = spec.conditioned(u, x1)
    assert rho_u == pytest.approx(0.02 - 0.1 / 0.9)
    x = np.log(gbr_sample_terminal(spec, u, x1, big_h, 50000, 4) / spec.spot_after(u, x1))
    var = big_h * (cond.theta - cond.tau * big_h)
    assert abs(x.mean() - rho_u * big_h) < 5 * math.sqrt(var / 50000)
    assert x.var() == pytest.approx(var, rel=0.03)


def test_positive_state_lowers_drift():
    spec = GbrSpec(100.0, 0.02, RayParams(0.5, 1.2, 1.0))
    assert spec.conditioned(0.3, 0.2)[1] < spec.conditioned(0.3, 0.0)[1] < spec.conditioned(0.3, -0.2)[1]


def test_real_measure_payoff_matches_mc():
    spec = GbrSpec(100.0, 0.03, RayParams(0.1, 1.5, 1.0))
    contract = OptionContract(100.0, 0.05, 0.5, spec.spot_after(0.2, 0.05))
    s = gbr_sample_terminal(spec, 0.2, 0.05, 0.5, 200000, 9)
    disc = math.exp(-0.05 * 0.5) * payoff(s, 100.0)
    assert real_measure_discounted_payoff(spec, 0.2, 0.05, contract) == pytest.approx(
        disc.mean(), abs=4 * disc.std() / math.sqrt(disc.size)
    )


# -- hedging ----------------------------------------------------------------


def test_degenerate_volatility_hedges_exactly():
    spec = GbrSpec(100.0, 0.05, RayParams(1e-10 * 1e6, 1e6, 2.0))
    res = hedge_replicate(spec, 0.0, 0.0, CANON, 16, 200, 1, theta1=1e-10)
    assert res.rms_error < 1e-6


def test_hedging_error_falls_with_rebalancing():
    spec = gbm_like()
    rms = [hedge_replicate(spec, 0.0, 0.0, CANON, n, 4000, 2).rms_error for n in (16, 32, 64)]
    assert rms[0] > rms[1] > rms[2]


def test_hedge_plan_is_self_financing():
    spec = gbm_like()
    res = hedge_replicate(spec, 0.0, 0.0, CANON, 8, 10, 5)
    plan = res.example_plan
    assert plan.n_steps == 8
    assert plan.portfolio[0] == pytest.approx(bsm_price(CANON, 0.04))
    assert np.all((plan.shares >= 0) & (plan.shares <= 1))


def test_hedge_mean_error_near_zero_in_gbm_limit():
    res = hedge_replicate(gbm_like(), 0.0, 0.0, CANON, 64, 20000, 6)
    assert abs(res.mean_error) < 4 * res.std_error_of_mean


def test_hedge_rejects_long_maturity():
    spec = GbrSpec(100.0, 0.0, RayParams(1.0, 2.0, 1.0))
    with pytest.raises(ValueError):
        hedge_replicate(spec, 0.5, 0.0, CANON, 16, 10, 0)
