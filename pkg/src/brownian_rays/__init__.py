"""Brownian rays: Gaussian processes with stationary increments and tunable mean reversion.

Covariance algebra, exact path sampling, transient laws of queues driven by
superposed rays, and option pricing on a geometric Brownian ray.
"""

from .core_process import (
    ConditionedState,
    PureBrownianMotion,
    RayComponent,
    RayParams,
    SuperposedCov,
    SuperpositionSpec,
    ThetaTau,
    canonical_compose,
    canonical_decompose,
    condition_ray,
    condition_superposition,
    doob_time_change,
    from_theta_tau,
    increment_variance,
    induced_drift,
    pinned_bridge_cov,
    ray_cov,
    superpose,
    to_theta_tau,
)

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
    "increment_variance",
    "induced_drift",
    "pinned_bridge_cov",
    "ray_cov",
    "superpose",
    "to_theta_tau",
]

__version__ = "0.1.0"
