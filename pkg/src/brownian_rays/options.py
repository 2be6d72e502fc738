"""European calls on a geometric Brownian ray.

The log-price is ``log S(t) = log S(0) + rho*t + X(t)`` with ``X`` a ray.
Given ``X(u) = x1`` the price after ``u`` is
``S_u(0) * exp(rho_ux*h + X_u(h))`` where ``S_u(0) = S(0)*exp(rho*u + x1)``
and ``X_u`` has covariance ``s*(theta - tau_u*t)``.  The quadratic variation
of ``log S`` grows at rate ``theta`` whatever ``tau_u`` is, so the
replicating price is Black-Scholes-Merton with ``sigma**2 = theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import sampler
from .core_process import RayParams, condition_ray, induced_drift


@dataclass(frozen=True)
class GbrSpec:
    s0: float
    rho: float
    ray: RayParams

    def __post_init__(self) -> None:
        if not self.s0 > 0:
            raise ValueError(f"s0 must be > 0, got {self.s0}")

    def spot_after(self, u: float, x1: float) -> float:
        """Price at ``u`` given ``X(u) = x1``."""
        return self.s0 * math.exp(self.rho * u + x1)

    def conditioned(self, u: float, x1: float) -> tuple[RayParams, float]:
        """Conditioned ray and log-drift ``rho - x1/(delta - u)`` on ``[0, big_delta-u]``."""
        return condition_ray(self.ray, u), self.rho + induced_drift(x1, self.ray, u)


@dataclass(frozen=True)
class OptionContract:
    strike: float
    rate: float
    maturity: float
    spot: float

    def __post_init__(self) -> None:
        if not self.strike > 0:
            raise ValueError(f"strike must be > 0, got {self.strike}")
        if not self.rate > 0:
            raise ValueError(f"rate must be > 0, got {self.rate}")
        if self.maturity < 0:
            raise ValueError(f"maturity must be >= 0, got {self.maturity}")
        if not self.spot > 0:
            raise ValueError(f"spot must be > 0, got {self.spot}")


@dataclass(frozen=True)
class HedgePlan:
    """Positions held over each rebalance interval of one path."""

    shares: np.ndarray
    bonds: np.ndarray
    portfolio: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.shares.size


@dataclass(frozen=True)
class HedgeResult:
    n_steps: int
    n_paths: int
    rms_error: float
    mean_error: float
    std_error_of_mean: float
    example_plan: HedgePlan


def payoff(terminal_price, strike: float):
    if not strike > 0:
        raise ValueError(f"strike must be > 0, got {strike}")
    out = np.maximum(np.asarray(terminal_price, dtype=float) - strike, 0.0)
    return float(out) if out.ndim == 0 else out


def _d1_d2(spot, strike, rate, h, theta1):
    root = np.sqrt(theta1 * h)
    d1 = (np.log(spot / strike) + (rate + 0.5 * theta1) * h) / root
    return d1, d1 - root


def bsm_call(spot, strike: float, rate: float, h, theta1: float):
    """Vectorised call value; ``h == 0`` gives the payoff."""
    spot = np.asarray(spot, dtype=float)
    h = np.asarray(h, dtype=float)
    live = h > 0
    hh = np.where(live, h, 1.0)
    d1, d2 = _d1_d2(spot, strike, rate, hh, theta1)
    value = spot * ndtr(d1) - strike * np.exp(-rate * hh) * ndtr(d2)
    return np.where(live, value, np.maximum(spot - strike, 0.0))


def bsm_call_delta(spot, strike: float, rate: float, h, theta1: float):
    spot = np.asarray(spot, dtype=float)
    h = np.asarray(h, dtype=float)
    live = h > 0
    hh = np.where(live, h, 1.0)
    d1, _ = _d1_d2(spot, strike, rate, hh, theta1)
    return np.where(live, ndtr(d1), np.where(spot > strike, 1.0, 0.0))


def bsm_price(contract: OptionContract, theta1: float) -> float:
    """Black-Scholes-Merton call value with variance rate ``theta1``."""
    if not theta1 > 0:
        raise ValueError(f"theta1 must be > 0, got {theta1}")
    c = contract
    return float(bsm_call(c.spot, c.strike, c.rate, c.maturity, theta1))


def bsm_delta(contract: OptionContract, theta1: float) -> float:
    if not theta1 > 0:
        raise ValueError(f"theta1 must be > 0, got {theta1}")
    c = contract
    return float(bsm_call_delta(c.spot, c.strike, c.rate, c.maturity, theta1))


def theta_from_covariance(
    r_uu: float,
    u: float,
    tau: float | None = None,
    r_uuh: float | None = None,
    big_h: float | None = None,
) -> tuple[float | None, float | None]:
    """Recover ``theta`` from covariances of the log-price ray.

    Form A uses the variance at ``u`` and ``tau``: ``R(u,u)/u + u*tau``.
    Form B uses the covariance with a later time ``u+H``:
    ``((u+H)*R(u,u)/u - R(u,u+H))/H``.  Either is ``None`` when its inputs
    are missing.
    """
    if not u > 0:
        raise ValueError(f"u must be > 0, got {u}")
    form_a = None if tau is None else r_uu / u + u * tau
    form_b = None
    if r_uuh is not None:
        if big_h is None or not big_h > 0:
            raise ValueError("form B needs H > 0")
        form_b = ((u + big_h) * r_uu / u - r_uuh) / big_h
    return form_a, form_b


def _log_price_law(spec: GbrSpec, u: float, x1: float, big_h: float) -> tuple[float, float]:
    cond, rho_u = spec.conditioned(u, x1)
    if not 0 <= big_h <= cond.big_delta:
        raise ValueError(f"H={big_h} must lie in [0, big_delta - u = {cond.big_delta}]")
    mean = math.log(spec.spot_after(u, x1)) + rho_u * big_h
    var = big_h * (cond.theta - cond.tau * big_h)
    return mean, var


def gbr_sample_terminal(
    spec: GbrSpec, u: float, x1: float, big_h: float, n_paths: int, seed: int
) -> np.ndarray:
    """Prices at ``u + H`` given ``X(u) = x1``, exact in law."""
    cond, rho_u = spec.conditioned(u, x1)
    if not 0 < big_h <= cond.big_delta:
        raise ValueError(f"H={big_h} must lie in (0, big_delta - u = {cond.big_delta}]")
    grid = sampler.TimeGrid(np.array([big_h]))
    x = sampler.sample_ray(cond, grid, n_paths, seed).values[:, 0]
    return spec.spot_after(u, x1) * np.exp(rho_u * big_h + x)


def real_measure_discounted_payoff(spec: GbrSpec, u: float, x1: float, contract: OptionContract) -> float:
    """``E[exp(-rH) (S(u+H) - C)^+]`` under the model's own (not risk-neutral) law.

    Closed form for a lognormal with log-mean ``m`` and log-variance ``s2``:
    ``exp(m + s2/2) * Phi(d) - C * Phi(d - sqrt(s2))``, ``d = (m - log C + s2)/sqrt(s2)``.
    """
    m, s2 = _log_price_law(spec, u, x1, contract.maturity)
    disc = math.exp(-contract.rate * contract.maturity)
    if s2 <= 0:
        return disc * max(math.exp(m) - contract.strike, 0.0)
    sd = math.sqrt(s2)
    d = (m - math.log(contract.strike) + s2) / sd
    return disc * (math.exp(m + 0.5 * s2) * float(ndtr(d)) - contract.strike * float(ndtr(d - sd)))


def hedge_replicate(
    spec: GbrSpec,
    u: float,
    x1: float,
    contract: OptionContract,
    n_steps: int,
    n_paths: int,
    seed: int,
    theta1: float | None = None,
) -> HedgeResult:
    """Discrete delta hedge of a call along simulated price paths.

    The portfolio starts at the option price, holds ``bsm_delta`` shares over
    each interval of a uniform grid, and puts the rest in the bond so each
    rebalance is self-financing.  Reports the error ``A(H) - payoff`` per path.
    ``theta1`` defaults to the ray's ``theta``.
    """
    if n_steps < 2:
        raise ValueError("n_steps must be >= 2")
    c = contract
    theta = spec.ray.theta if theta1 is None else theta1
    cond, rho_u = spec.conditioned(u, x1)
    if not 0 < c.maturity <= cond.big_delta:
        raise ValueError(f"maturity must lie in (0, big_delta - u = {cond.big_delta}]")
    grid = sampler.TimeGrid.uniform(c.maturity, n_steps)
    log_paths = sampler.sample_ray(cond, grid, n_paths, seed).values + rho_u * grid.points
    prices = np.concatenate([np.full((n_paths, 1), c.spot), c.spot * np.exp(log_paths)], axis=1)
    times = np.concatenate([[0.0], grid.points])
    bond = np.exp(c.rate * times)

    value = np.full(n_paths, bsm_price(c, theta))
    shares_hist = np.empty((n_paths, n_steps))
    bonds_hist = np.empty((n_paths, n_steps))
    value_hist = np.empty((n_paths, n_steps + 1))
    value_hist[:, 0] = value
    for k in range(n_steps):
        shares = bsm_call_delta(prices[:, k], c.strike, c.rate, c.maturity - times[k], theta)
        bonds = (value - shares * prices[:, k]) / bond[k]
        shares_hist[:, k] = shares
        bonds_hist[:, k] = bonds
        value = shares * prices[:, k + 1] + bonds * bond[k + 1]
        value_hist[:, k + 1] = value

    err = value - payoff(prices[:, -1], c.strike)
    plan = HedgePlan(shares_hist[0], bonds_hist[0], value_hist[0])
    return HedgeResult(
        n_steps=n_steps,
        n_paths=n_paths,
        rms_error=float(np.sqrt(np.mean(err**2))),
        mean_error=float(np.mean(err)),
        std_error_of_mean=float(np.std(err, ddof=1) / math.sqrt(n_paths)),
        example_plan=plan,
    )
