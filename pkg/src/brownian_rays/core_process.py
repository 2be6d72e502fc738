"""Parameter algebra and covariance kernels for Brownian rays.

A Brownian ray on ``[0, big_delta]`` is the zero-mean Gaussian process with
``X(0) = 0`` and covariance ``phi * (s/delta) * (1 - t/delta)`` for
``s <= t``, where ``delta >= big_delta``.  Equivalently the covariance is
``s * (theta - tau * t)`` with ``theta = phi/delta`` (variance rate) and
``tau = phi/delta**2`` (autoregressive rate).  Weighted sums of independent
rays, rays conditioned on their current state, and rays pinned at the end of
a window are again of this form, which is what the functions below compute.

All functions are pure; the dataclasses are frozen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def _check_finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class RayParams:
    """One Brownian ray: variance scale ``phi``, autoregressive horizon
    ``delta`` and modeling horizon ``big_delta``."""

    phi: float
    delta: float
    big_delta: float

    def __post_init__(self) -> None:
        for name in ("phi", "delta", "big_delta"):
            object.__setattr__(self, name, _check_finite(getattr(self, name), name))
        if self.phi <= 0:
            raise ValueError(f"phi must be > 0, got {self.phi}")
        if self.big_delta <= 0:
            raise ValueError(f"big_delta must be > 0, got {self.big_delta}")
        if self.delta < self.big_delta:
            raise ValueError(
                f"delta must be >= big_delta (got delta={self.delta}, "
                f"big_delta={self.big_delta})"
            )

    @property
    def theta(self) -> float:
        return self.phi / self.delta

    @property
    def tau(self) -> float:
        return self.phi / (self.delta * self.delta)

    def as_cov(self) -> "SuperposedCov":
        """The same kernel in ``(theta, tau)`` form, valid on ``[0, big_delta]``."""
        return SuperposedCov(self.theta, self.tau, self.big_delta)


@dataclass(frozen=True)
class PureBrownianMotion:
    """Limit of the canonical sum when the bridge weight vanishes (``chi = 1``).

    Covariance ``variance_rate * min(s, t)``; corresponds to ``delta = inf``,
    which :class:`RayParams` deliberately cannot hold.
    """

    variance_rate: float
    big_delta: float

    def __post_init__(self) -> None:
        if not self.variance_rate > 0:
            raise ValueError(f"variance_rate must be > 0, got {self.variance_rate}")

    def as_cov(self) -> "SuperposedCov":
        return SuperposedCov(self.variance_rate, 0.0, self.big_delta)


@dataclass(frozen=True)
class ThetaTau:
    theta: float
    tau: float

    def __post_init__(self) -> None:
        if not (self.theta > 0 and self.tau > 0):
            raise ValueError(f"theta and tau must be > 0, got {self.theta}, {self.tau}")


@dataclass(frozen=True)
class RayComponent:
    """A ray entering a superposition with weight ``weight`` (any real)."""

    weight: float
    params: RayParams


@dataclass(frozen=True)
class SuperpositionSpec:
    """Net input ``Z(t) = rho*t + sum_i k_i X_i(t)`` of independent rays."""

    components: tuple[RayComponent, ...]
    rho: float = 0.0

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a superposition needs at least one component")
        horizons = {c.params.big_delta for c in comps}
        if len(horizons) != 1:
            raise ValueError(f"components must share big_delta, got {sorted(horizons)}")
        if all(c.weight == 0 for c in comps):
            raise ValueError("at least one component weight must be nonzero")
        object.__setattr__(self, "rho", _check_finite(self.rho, "rho"))

    @classmethod
    def single(cls, params: RayParams, rho: float = 0.0, weight: float = 1.0) -> "SuperpositionSpec":
        return cls((RayComponent(weight, params),), rho)

    @property
    def big_delta(self) -> float:
        return self.components[0].params.big_delta

    @property
    def min_delta(self) -> float:
        return min(c.params.delta for c in self.components)

    def __len__(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class SuperposedCov:
    """Kernel ``s * (big_theta - big_t * t)`` for ``s <= t`` on ``[0, horizon]``."""

    big_theta: float
    big_t: float
    horizon: float = math.inf

    def __post_init__(self) -> None:
        if not self.big_theta > 0:
            raise ValueError(f"big_theta must be > 0, got {self.big_theta}")
        if self.big_t < 0:
            raise ValueError(f"big_t must be >= 0, got {self.big_t}")

    def kernel(self, s, t):
        """Vectorised covariance; arguments may be in either order."""
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        lo = np.minimum(s, t)
        hi = np.maximum(s, t)
        return lo * (self.big_theta - self.big_t * hi)

    def variance(self, t):
        t = np.asarray(t, dtype=float)
        return t * (self.big_theta - self.big_t * t)

    @property
    def bridge_length(self) -> float:
        """Time at which the variance returns to zero (``inf`` for motion)."""
        return math.inf if self.big_t == 0 else self.big_theta / self.big_t


@dataclass(frozen=True)
class ConditionedState:
    """Observation time ``u``, component states ``x`` and queue level ``v``."""

    u: float
    x: tuple[float, ...]
    v: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", tuple(float(xi) for xi in self.x))
        if self.u < 0:
            raise ValueError(f"u must be >= 0, got {self.u}")
        if self.v < 0:
            raise ValueError(f"v must be >= 0, got {self.v}")

    @classmethod
    def initial(cls, n_components: int, v: float = 0.0) -> "ConditionedState":
        return cls(0.0, (0.0,) * n_components, v)


# ---------------------------------------------------------------------------
# single-ray algebra


def ray_cov(p: RayParams, s, t):
    """Covariance ``phi * (s/delta) * (1 - t/delta)`` of a ray, for ``s <= t``.

    Arguments are swapped when ``s > t``; arrays broadcast.  Times outside
    ``[0, p.big_delta]`` raise ``ValueError``.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    for arr, name in ((s, "s"), (t, "t")):
        if np.any(arr < 0):
            raise ValueError(f"{name} must be >= 0")
        if np.any(arr > p.big_delta):
            raise ValueError(f"{name} exceeds big_delta={p.big_delta}")
    lo = np.minimum(s, t)
    hi = np.maximum(s, t)
    out = p.phi * (lo / p.delta) * (1.0 - hi / p.delta)
    return float(out) if out.ndim == 0 else out


def to_theta_tau(p: RayParams) -> ThetaTau:
    return ThetaTau(p.theta, p.tau)


def from_theta_tau(tt: ThetaTau, big_delta: float) -> RayParams:
    """Inverse of :func:`to_theta_tau`: ``phi = theta**2/tau``, ``delta = theta/tau``."""
    delta = tt.theta / tt.tau
    # a few ulps of rounding on a pure bridge must not flip it off the horizon
    if delta < big_delta * (1.0 - 8 * np.finfo(float).eps):
        raise ValueError(
            f"theta/tau = {delta} is below big_delta = {big_delta}; not a ray on this horizon"
        )
    return RayParams(tt.theta * tt.theta / tt.tau, max(delta, big_delta), big_delta)


def canonical_compose(chi: float, psi: float, beta: float, big_delta: float):
    """Ray parameters of ``(1-chi)*sqrt(psi)*bridge + chi*sqrt(beta)*motion``.

    The bridge is a unit Brownian bridge on ``[0, big_delta]`` and the motion
    an independent standard Brownian motion.  ``chi == 1`` leaves no bridge,
    so a :class:`PureBrownianMotion` is returned instead of a ray.
    """
    if not 0 <= chi <= 1:
        raise ValueError(f"chi must lie in [0, 1], got {chi}")
    if psi <= 0 or beta <= 0 or big_delta <= 0:
        raise ValueError("psi, beta and big_delta must be > 0")
    if chi == 1:
        return PureBrownianMotion(beta, big_delta)
    bridge = psi * (1 - chi) ** 2
    total = bridge + big_delta * beta * chi * chi
    phi = total * total / bridge
    delta = big_delta * total / bridge
    return RayParams(phi, max(delta, big_delta), big_delta)


def canonical_decompose(p: RayParams, chi: float) -> tuple[float, float]:
    """Return ``(psi, beta)`` such that ``canonical_compose(chi, psi, beta)`` gives ``p``.

    ``beta = (delta - big_delta) * phi / (delta*chi)**2``, which is zero for a
    pure bridge (``delta == big_delta``).
    """
    if not 0 < chi < 1:
        raise ValueError(f"chi must lie in (0, 1), got {chi}")
    d, big = p.delta, p.big_delta
    psi = big * big * p.phi / (d * (1 - chi)) ** 2
    beta = (d - big) * p.phi / (d * chi) ** 2
    return psi, beta


def condition_ray(p: RayParams, u: float) -> RayParams:
    """Law of ``X(u+h) - X(u) + x*h/(delta-u)`` given ``X(u) = x``, on ``[0, big_delta-u]``."""
    if not 0 <= u < p.big_delta:
        raise ValueError(f"u must lie in [0, big_delta={p.big_delta}), got {u}")
    if u == 0:
        return p
    return RayParams(p.phi * (p.delta - u) / p.delta, p.delta - u, p.big_delta - u)


def induced_drift(x: float, p: RayParams, u: float) -> float:
    """Drift ``-x/(delta-u)`` that conditioning on ``X(u) = x`` adds to the ray."""
    if not 0 <= u < p.big_delta:
        raise ValueError(f"u must lie in [0, big_delta={p.big_delta}), got {u}")
    return -x / (p.delta - u)


# ---------------------------------------------------------------------------
# superpositions


def superpose(spec: SuperpositionSpec) -> SuperposedCov:
    big_theta = math.fsum(c.weight**2 * c.params.theta for c in spec.components)
    big_t = math.fsum(c.weight**2 * c.params.tau for c in spec.components)
    return SuperposedCov(big_theta, big_t, spec.big_delta)


def _check_state(spec: SuperpositionSpec, state: ConditionedState) -> None:
    if len(state.x) != len(spec):
        raise ValueError(f"state has {len(state.x)} component values, spec has {len(spec)}")
    if state.u >= spec.big_delta:
        raise ValueError(f"u={state.u} must be < big_delta={spec.big_delta}")
    if state.u >= spec.min_delta:
        raise ValueError(f"u={state.u} must be < min delta={spec.min_delta}")


def condition_superposition(
    spec: SuperpositionSpec, state: ConditionedState
) -> tuple[SuperposedCov, float]:
    """Conditioned kernel ``s*(Theta - T_u*t)`` on ``[0, big_delta-u]`` and drift ``rho_ux``.

    ``T_u = sum k_i**2 * theta_i/(delta_i - u)`` and
    ``rho_ux = rho - sum k_i * x_i/(delta_i - u)``.
    """
    _check_state(spec, state)
    u = state.u
    conditioned = [condition_ray(c.params, u) for c in spec.components]
    big_theta = math.fsum(c.weight**2 * q.theta for c, q in zip(spec.components, conditioned))
    big_t = math.fsum(c.weight**2 * q.tau for c, q in zip(spec.components, conditioned))
    rho_ux = spec.rho + math.fsum(
        c.weight * induced_drift(x, c.params, u) for c, x in zip(spec.components, state.x)
    )
    return SuperposedCov(big_theta, big_t, spec.big_delta - u), rho_ux


def pinned_bridge_cov(big_theta: float, w: float, s, t):
    """Covariance ``s*Theta*(1 - t/w)`` of the net input pinned over a window ``w``."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0) or np.any(t < 0):
        raise ValueError("times must be >= 0")
    if np.any(s > w) or np.any(t > w):
        raise ValueError(f"times must not exceed the window w={w}")
    lo = np.minimum(s, t)
    hi = np.maximum(s, t)
    out = lo * big_theta * (1.0 - hi / w)
    return float(out) if out.ndim == 0 else out


def increment_variance(cov: SuperposedCov | ThetaTau, d: float) -> float:
    """Variance ``d*(Theta - T*d)`` of any increment over a lag ``d``."""
    if isinstance(cov, ThetaTau):
        big_theta, big_t = cov.theta, cov.tau
    else:
        big_theta, big_t = cov.big_theta, cov.big_t
    if d < 0:
        raise ValueError(f"lag must be >= 0, got {d}")
    return d * (big_theta - big_t * d)


def doob_time_change(big_theta: float, big_t: float, t: float) -> tuple[float, float]:
    """Map a ray with kernel ``s*(Theta - T*t)`` to standard Brownian motion.

    Returns ``(orig_time, scale)`` with ``B(t) = scale * X(orig_time)``.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    denom = 1.0 + t * big_t
    return t * big_theta / denom, denom / big_theta


def gram_matrix(kernel, grid: Sequence[float]) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    return np.asarray(kernel(g[:, None], g[None, :]), dtype=float)


__all__ = [
    "ConditionedState",
    "PureBrownianMotion",
    "RayComponent",
    "RayParams",
    "SuperposedCov",
    "SuperpositionSpec",
    "ThetaTau",
    "canonical_compose",
    "canonical_decompose",
    "condition_ray",
    "condition_superposition",
    "doob_time_change",
    "from_theta_tau",
    "gram_matrix",
    "increment_variance",
    "induced_drift",
    "pinned_bridge_cov",
    "ray_cov",
    "superpose",
    "to_theta_tau",
]
