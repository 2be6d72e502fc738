"""Transient and limiting distributions of a queue fed by superposed rays.

The queue is ``Q(t) = Q(0) + Z(t) + L(t)`` with net input ``Z`` a drifted
superposition of rays and ``L`` the minimal non-decreasing regulator keeping
``Q >= 0``.  Every distribution here is a special case of one four-term
expression in ``(Theta, T, rho, v, h, q)``::

    F = 1/2 * (1 - E - erf(A) + E * erf(B))
      = 1/2 * (erfc(A) - E * erfc(B))

    E = exp(-2q(Tq - Theta*rho) / Theta**2)
    A = (v + rho*h - q) / sqrt(2h(Theta - T*h))
    B = (Theta*(q+v) - (2Tq - Theta*rho)*h) / (Theta*sqrt(2h(Theta - T*h)))

Conditioning on the state at ``u`` substitutes ``T -> T_u`` and
``rho -> rho_ux``; pinning the window increment to ``z`` over ``w``
substitutes ``T -> Theta/w`` and ``rho -> z/w``.  ``T = 0`` is regulated
Brownian motion.  The product ``E * erfc(B)`` is evaluated as
``erfcx(B) * exp(log E - B**2)`` for ``B >= 0`` so it never overflows when
the exact value is finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import erfc, erfcx

from .core_process import (
    ConditionedState,
    SuperposedCov,
    SuperpositionSpec,
    condition_superposition,
    superpose,
)

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class QueueQuery:
    spec: SuperpositionSpec
    state: ConditionedState
    h: float
    q: float = 0.0

    def __post_init__(self) -> None:
        horizon = self.spec.big_delta - self.state.u
        if not 0 < self.h <= horizon:
            raise ValueError(f"h={self.h} must lie in (0, big_delta - u = {horizon}]")


@dataclass(frozen=True)
class PinnedQueueQuery:
    spec: SuperpositionSpec
    state: ConditionedState
    h: float
    w: float
    z: float
    q: float = 0.0

    def __post_init__(self) -> None:
        horizon = self.spec.big_delta - self.state.u
        if not 0 < self.w <= horizon:
            raise ValueError(f"w={self.w} must lie in (0, big_delta - u = {horizon}]")
        if not 0 < self.h < self.w:
            raise ValueError(
                f"h={self.h} must lie in (0, w={self.w}); use endpoint_cdf for h == w"
            )


# ---------------------------------------------------------------------------
# the four-term kernel


def _scale(big_theta: float, big_t: float, h: float) -> float:
    if h <= 0:
        raise ValueError(f"elapsed time must be > 0, got {h}")
    var_rate = big_theta - big_t * h
    if not var_rate > 0:
        raise ValueError(
            f"Theta - T*h = {var_rate:.6g} must be > 0 (h={h} at or beyond the bridge end)"
        )
    return math.sqrt(2.0 * h * var_rate)


def _exp_times_erfc(log_e, b):
    """``exp(log_e) * erfc(b)`` without overflow in either factor."""
    log_e = np.asarray(log_e, dtype=float)
    b = np.asarray(b, dtype=float)
    pos = b >= 0
    with np.errstate(over="ignore", invalid="ignore"):
        via_x = erfcx(np.where(pos, b, 0.0)) * np.exp(log_e - np.where(pos, b, 0.0) ** 2)
        direct = np.exp(np.where(pos, 0.0, log_e)) * erfc(np.where(pos, 0.0, b))
    return np.where(pos, via_x, direct)


def _terms(big_theta, big_t, rho, v, h, q):
    s = _scale(big_theta, big_t, h)
    q = np.asarray(q, dtype=float)
    log_e = -2.0 * q * (big_t * q - big_theta * rho) / big_theta**2
    a = (v + rho * h - q) / s
    b = (big_theta * (q + v) - (2.0 * big_t * q - big_theta * rho) * h) / (big_theta * s)
    return s, log_e, a, b


def four_term(big_theta: float, big_t: float, rho: float, v: float, h: float, q):
    """Raw four-term expression, with no special handling of ``q <= 0``."""
    _, log_e, a, b = _terms(big_theta, big_t, rho, v, h, q)
    return 0.5 * (erfc(a) - _exp_times_erfc(log_e, b))


def regulated_ray_cdf(big_theta: float, big_t: float, rho: float, v: float, h: float, q):
    """``P(Q(h) <= q)`` for a queue started at ``v`` with net input of kernel
    ``s*(big_theta - big_t*t)`` and drift ``rho``.  Zero for ``q <= 0``."""
    if v < 0:
        raise ValueError(f"v must be >= 0, got {v}")
    q_arr = np.asarray(q, dtype=float)
    out = np.where(q_arr > 0, four_term(big_theta, big_t, rho, v, h, np.maximum(q_arr, 0.0)), 0.0)
    return float(out) if out.ndim == 0 else out


def regulated_ray_density(big_theta: float, big_t: float, rho: float, v: float, h: float, q):
    """``d/dq`` of :func:`regulated_ray_cdf` for ``q > 0``.

    Differentiating ``(erfc(A) - E*erfc(B))/2`` with ``A' = -1/s``,
    ``B' = (Theta - 2Th)/(Theta*s)`` and ``E' = -E*2(2Tq - Theta*rho)/Theta**2``::

        f = exp(-A**2)/(sqrt(pi)*s)
          + E*erfc(B)*(2Tq - Theta*rho)/Theta**2
          + E*exp(-B**2)*(Theta - 2Th)/(sqrt(pi)*Theta*s)
    """
    s, log_e, a, b = _terms(big_theta, big_t, rho, v, h, q)
    q = np.asarray(q, dtype=float)
    out = (
        np.exp(-a * a) / (_SQRT_PI * s)
        + _exp_times_erfc(log_e, b) * (2.0 * big_t * q - big_theta * rho) / big_theta**2
        + np.exp(log_e - b * b) * (big_theta - 2.0 * big_t * h) / (_SQRT_PI * big_theta * s)
    )
    out = np.where(q > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# conditioned transient law


def _conditioned(spec: SuperpositionSpec, state: ConditionedState, h: float) -> tuple[SuperposedCov, float]:
    cov, rho_ux = condition_superposition(spec, state)
    if not 0 < h <= cov.horizon:
        raise ValueError(f"h={h} must lie in (0, big_delta - u = {cov.horizon}]")
    return cov, rho_ux


def transient_cdf(query: QueueQuery, q=None):
    """``P(Q(u+h) <= q | Q(u) = v, X_i(u) = x_i)``.

    ``q`` defaults to ``query.q``; an array sweeps the threshold.
    """
    q = query.q if q is None else q
    cov, rho_ux = _conditioned(query.spec, query.state, query.h)
    return regulated_ray_cdf(cov.big_theta, cov.big_t, rho_ux, query.state.v, query.h, q)


def transient_density(query: QueueQuery, q=None):
    q = query.q if q is None else q
    cov, rho_ux = _conditioned(query.spec, query.state, query.h)
    return regulated_ray_density(cov.big_theta, cov.big_t, rho_ux, query.state.v, query.h, q)


def unconditional_cdf(spec: SuperpositionSpec, v: float, t: float, q):
    """``P(Q(t) <= q | Q(0) = v)`` with all rays started at zero."""
    state = ConditionedState.initial(len(spec), v)
    return transient_cdf(QueueQuery(spec, state, t), q)


def rbb_stationary_cdf(big_theta: float, big_t: float, rho: float, q):
    """Limit of the unconditional law as ``t -> Theta/T`` for a bridge net input:
    ``1 - exp(-2q(Tq - Theta*rho)/Theta**2)``."""
    if not (big_theta > 0 and big_t > 0):
        raise ValueError("Theta and T must be > 0")
    q = np.asarray(q, dtype=float)
    out = np.where(q > 0, -np.expm1(-2.0 * q * (big_t * q - big_theta * rho) / big_theta**2), 0.0)
    if np.any(out < 0) or np.any(out > 1):
        raise ArithmeticError("stationary distribution left [0, 1]; need rho <= T*q/Theta")
    return float(out) if out.ndim == 0 else out


def rbm_transient_cdf(big_theta: float, rho: float, v: float, t: float, q):
    """Regulated Brownian motion with drift ``rho`` and variance rate ``Theta``.

    ``1/2*(1 - e^{2 rho q/Theta} - erf((v + rho t - q)/sqrt(2 Theta t))
    + e^{2 rho q/Theta} erf((v + rho t + q)/sqrt(2 Theta t)))``
    """
    if big_theta <= 0 or t <= 0 or v < 0:
        raise ValueError("need Theta > 0, t > 0, v >= 0")
    q = np.asarray(q, dtype=float)
    root = math.sqrt(2.0 * big_theta * t)
    lo = (v + rho * t - q) / root
    hi = (v + rho * t + q) / root
    out = 0.5 * (erfc(lo) - _exp_times_erfc(2.0 * rho * q / big_theta, hi))
    out = np.where(q > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# net input without the boundary


def netinput_mean(spec: SuperpositionSpec, state: ConditionedState, h: float) -> float:
    _, rho_ux = _conditioned(spec, state, h)
    return rho_ux * h


def netinput_var(spec: SuperpositionSpec, state: ConditionedState, h: float) -> float:
    cov, _ = _conditioned(spec, state, h)
    var = h * (cov.big_theta - cov.big_t * h)
    if not var > 0:
        raise ValueError(f"Theta - T_u*h must be > 0 at h={h}")
    return var


def netinput_cdf(spec: SuperpositionSpec, state: ConditionedState, h: float, a):
    """Gaussian law of the net input increment over ``h``; the large-``v`` limit
    of ``transient_cdf(q = v + a)``."""
    mean = netinput_mean(spec, state, h)
    sd = math.sqrt(2.0 * netinput_var(spec, state, h))
    out = 0.5 * erfc((mean - np.asarray(a, dtype=float)) / sd)
    return float(out) if np.ndim(out) == 0 else out


def netinput_density(spec: SuperpositionSpec, state: ConditionedState, h: float, a):
    mean = netinput_mean(spec, state, h)
    var = netinput_var(spec, state, h)
    a = np.asarray(a, dtype=float)
    out = np.exp(-((a - mean) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# pinned window


def pinned_transient_cdf(query: PinnedQueueQuery, q=None):
    """``P(Q(u+h) <= q | Q(u) = v, Z(u+w) - Z(u) = z)``; free of ``rho`` and ``x``.

    Same four-term expression with ``T -> Theta/w`` and ``rho -> z/w``.
    """
    q = query.q if q is None else q
    big_theta = superpose(query.spec).big_theta
    return regulated_ray_cdf(
        big_theta, big_theta / query.w, query.z / query.w, query.state.v, query.h, q
    )


def pinned_large_v_cdf(big_theta: float, w: float, z: float, h: float, a):
    """Large-``v`` limit of ``pinned_transient_cdf(q = v + a)``: a Gaussian with
    mean ``z*h/w`` and variance ``h*Theta*(1 - h/w)``."""
    if not 0 < h < w:
        raise ValueError(f"h={h} must lie in (0, w={w})")
    sd = math.sqrt(2.0 * h * big_theta * (1.0 - h / w))
    out = 0.5 * erfc((z * h / w - np.asarray(a, dtype=float)) / sd)
    return float(out) if np.ndim(out) == 0 else out


def pinned_pointmass_limit(a, z: float):
    """Step function the large-``v`` pinned law approaches as ``h -> w``."""
    return np.where(np.asarray(a, dtype=float) >= z, 1.0, 0.0)


def _endpoint_args(spec: SuperpositionSpec, state: ConditionedState, w: float) -> float:
    if not 0 < w <= spec.big_delta - state.u:
        raise ValueError(f"w={w} must lie in (0, big_delta - u]")
    return w * superpose(spec).big_theta


def endpoint_atom(spec: SuperpositionSpec, state: ConditionedState, w: float, z: float) -> tuple[float, float]:
    """Location ``max(0, v+z)`` and mass of the atom of ``Q(u+w)`` given ``z``.

    The mass is the probability the pinned path never reaches zero,
    ``1 - exp(-2v(v+z)/(w*Theta))`` when ``v + z > 0`` and zero otherwise.
    """
    scale = _endpoint_args(spec, state, w)
    v = state.v
    loc = max(0.0, v + z)
    mass = -math.expm1(-2.0 * v * (v + z) / scale) if v + z > 0 else 0.0
    return loc, mass


def endpoint_cdf(spec: SuperpositionSpec, state: ConditionedState, w: float, z: float, q):
    """Right-continuous law of ``Q(u+w)`` given ``Z(u+w) - Z(u) = z``:
    ``1 - exp(-2q(q-z)/(w*Theta))`` for ``q >= max(0, v+z)``, else 0."""
    scale = _endpoint_args(spec, state, w)
    q = np.asarray(q, dtype=float)
    support = q >= max(0.0, state.v + z)
    out = np.where(support, -np.expm1(-2.0 * q * (q - z) / scale), 0.0)
    return float(out) if out.ndim == 0 else out


def endpoint_density(spec: SuperpositionSpec, state: ConditionedState, w: float, z, q):
    """Absolutely continuous part of the endpoint law in ``q``:
    ``2(2q - z)/(w*Theta) * exp(-2q(q-z)/(w*Theta))`` above the atom."""
    scale = _endpoint_args(spec, state, w)
    q = np.asarray(q, dtype=float)
    z = np.asarray(z, dtype=float)
    above = q > np.maximum(0.0, state.v + z)
    out = np.where(above, 2.0 * (2.0 * q - z) / scale * np.exp(-2.0 * q * (q - z) / scale), 0.0)
    return float(out) if out.ndim == 0 else out


def endpoint_mean(spec: SuperpositionSpec, state: ConditionedState, w: float, z: float) -> float:
    """``E[Q(u+w) | z]`` by integrating the survival function of :func:`endpoint_cdf`."""
    scale = _endpoint_args(spec, state, w)
    lo = max(0.0, state.v + z)
    tail, _ = integrate.quad(
        lambda q: math.exp(-2.0 * q * (q - z) / scale), lo, math.inf, epsabs=1e-13, epsrel=1e-12
    )
    return lo + tail


def endpoint_mean_unscaled(big_theta: float, v: float, z: float) -> float:
    """Closed form for the endpoint mean without the window scaling, for comparison only.

    It has no dependence on the window length and does not agree with the
    integrated mean; see :func:`endpoint_mean`.
    """
    arg = (2 * math.sqrt(2) * v + math.sqrt(2) * z) / (2 * math.sqrt(big_theta))
    return z + v + math.sqrt(2 * math.pi * big_theta) * (math.erf(arg) - 1) * math.exp(z / (2 * big_theta)) / 4


# ---------------------------------------------------------------------------
# posterior of the window increment given both queue levels


def _posterior_parts(spec, state, w, q):
    query = QueueQuery(spec, state, w)
    f_q = transient_density(query, q)
    if not f_q > 0:
        raise ValueError(f"queue density vanishes at q={q}; posterior undefined")
    return f_q


def netinput_posterior_density(spec: SuperpositionSpec, state: ConditionedState, w: float, q: float, z):
    """Density in ``z`` of ``Z(u+w) - Z(u)`` given ``Q(u) = v`` and ``Q(u+w) = q``.

    Bayes' rule with the endpoint density (likelihood), the Gaussian net-input
    law (prior) and the unpinned queue density (evidence).  This is the
    absolutely continuous part; paths that never touch zero put an atom at
    ``z = q - v``, returned by :func:`netinput_posterior_atom`.
    """
    if q <= 0:
        raise ValueError(f"q must be > 0, got {q}")
    f_q = _posterior_parts(spec, state, w, q)
    like = endpoint_density(spec, state, w, z, q)
    prior = netinput_density(spec, state, w, z)
    out = like * prior / f_q
    return float(out) if np.ndim(out) == 0 else out


def netinput_posterior_atom(spec: SuperpositionSpec, state: ConditionedState, w: float, q: float) -> tuple[float, float]:
    """Location ``q - v`` and posterior mass of the no-reflection atom."""
    if q <= 0:
        raise ValueError(f"q must be > 0, got {q}")
    f_q = _posterior_parts(spec, state, w, q)
    z0 = q - state.v
    _, mass = endpoint_atom(spec, state, w, z0)
    return z0, mass * netinput_density(spec, state, w, z0) / f_q


def netinput_posterior_mass(spec: SuperpositionSpec, state: ConditionedState, w: float, q: float) -> float:
    """Total posterior probability: continuous part integrated plus the atom."""
    z0, atom = netinput_posterior_atom(spec, state, w, q)
    sd = math.sqrt(netinput_var(spec, state, w))
    cont, _ = integrate.quad(
        lambda zz: netinput_posterior_density(spec, state, w, q, zz),
        z0 - 40.0 * sd - abs(z0), z0, epsabs=1e-12, epsrel=1e-10, limit=200,
    )
    return cont + atom


__all__ = [
    "PinnedQueueQuery",
    "QueueQuery",
    "endpoint_atom",
    "endpoint_cdf",
    "endpoint_density",
    "endpoint_mean",
    "endpoint_mean_unscaled",
    "four_term",
    "netinput_cdf",
    "netinput_density",
    "netinput_mean",
    "netinput_posterior_atom",
    "netinput_posterior_density",
    "netinput_posterior_mass",
    "netinput_var",
    "pinned_large_v_cdf",
    "pinned_pointmass_limit",
    "pinned_transient_cdf",
    "rbb_stationary_cdf",
    "rbm_transient_cdf",
    "regulated_ray_cdf",
    "regulated_ray_density",
    "transient_cdf",
    "transient_density",
    "unconditional_cdf",
]
