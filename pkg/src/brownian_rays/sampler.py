"""Exact Gaussian path sampling on finite grids and discrete reflection.

Randomness is organised in fixed-size blocks of paths.  Block ``b`` of
stream ``s`` under master seed ``seed`` draws from a Philox generator keyed
by ``SeedSequence([seed, s, b])``, so path ``i`` depends only on
``(seed, i)`` and never on the batch size or on how blocks are spread over
worker threads.

Two factorisations of the Gram matrix are used:

* kernels of the ray form ``s*(Theta - T*t)`` factor as
  ``X(t) = v(t) * W(t/v(t))`` with ``v(t) = Theta - T*t`` and ``W`` a standard
  Brownian motion.  On a grid this *is* the lower Cholesky factor of the Gram
  matrix, applied in O(n) with a cumulative sum;
* any other kernel goes through :func:`cholesky_with_jitter`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .core_process import (
    ConditionedState,
    RayParams,
    SuperposedCov,
    SuperpositionSpec,
    condition_superposition,
    gram_matrix,
    superpose,
)

BLOCK_SIZE = 1024

# stream ids keep independent components of one simulation apart
STREAM_GAUSS = 0
STREAM_BRIDGE_MIN = 1
STREAM_MOTION = 2
STREAM_BRIDGES = 16


class FactorizationError(ValueError):
    """The Gram matrix on the requested grid is not positive semidefinite."""


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing sample times in ``(0, horizon]``; ``t=0`` is implicit."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float).ravel()
        if pts.size == 0:
            raise ValueError("grid must contain at least one point")
        if pts[0] <= 0:
            raise ValueError("grid points must be > 0 (the origin is implicit)")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, end: float, n: int) -> "TimeGrid":
        return cls(np.linspace(end / n, end, n))

    def check_within(self, horizon: float) -> None:
        if self.points[-1] > horizon * (1 + 1e-12):
            raise ValueError(f"grid ends at {self.points[-1]}, beyond horizon {horizon}")

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.points, prepend=0.0)

    def __len__(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class SamplePathBatch:
    grid: TimeGrid
    values: np.ndarray
    seed: int
    drift_applied: bool = False

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[1] != len(self.grid):
            raise ValueError(f"values shape {vals.shape} does not match grid of {len(self.grid)}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class RegulatedPath:
    """Queue ``q`` and cumulative lost potential output ``l`` on a grid."""

    q: np.ndarray
    l: np.ndarray


# ---------------------------------------------------------------------------
# randomness


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream, block])))


def _normal_rows(seed: int, stream: int, start: int, stop: int, width: int) -> np.ndarray:
    """Standard normals for paths ``start..stop-1``; row ``i`` depends only on ``(seed, i)``."""
    out = np.empty((stop - start, width))
    b0, b1 = start // BLOCK_SIZE, (stop - 1) // BLOCK_SIZE
    for b in range(b0, b1 + 1):
        z = block_rng(seed, stream, b).standard_normal((BLOCK_SIZE, width))
        lo = max(start, b * BLOCK_SIZE)
        hi = min(stop, (b + 1) * BLOCK_SIZE)
        out[lo - start : hi - start] = z[lo - b * BLOCK_SIZE : hi - b * BLOCK_SIZE]
    return out


def _uniform_rows(seed: int, stream: int, start: int, stop: int, width: int) -> np.ndarray:
    out = np.empty((stop - start, width))
    b0, b1 = start // BLOCK_SIZE, (stop - 1) // BLOCK_SIZE
    for b in range(b0, b1 + 1):
        z = block_rng(seed, stream, b).random((BLOCK_SIZE, width))
        lo = max(start, b * BLOCK_SIZE)
        hi = min(stop, (b + 1) * BLOCK_SIZE)
        out[lo - start : hi - start] = z[lo - b * BLOCK_SIZE : hi - b * BLOCK_SIZE]
    return out


def iter_blocks(n_paths: int, chunk: int = BLOCK_SIZE * 8) -> Iterator[tuple[int, int]]:
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    for start in range(0, n_paths, chunk):
        yield start, min(n_paths, start + chunk)


def map_blocks(fn: Callable[[int, int], np.ndarray], n_paths: int, workers: int = 1) -> np.ndarray:
    """Evaluate ``fn(start, stop)`` over path ranges and stack the results in order."""
    ranges = list(iter_blocks(n_paths))
    if workers <= 1:
        parts = [fn(a, b) for a, b in ranges]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda r: fn(*r), ranges))
    return np.concatenate(parts, axis=0)


# ---------------------------------------------------------------------------
# factorisations


def cholesky_with_jitter(gram: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, retrying with jitter ``1e-12`` then ``1e-10`` times the trace."""
    gram = np.asarray(gram, dtype=float)
    trace = float(np.trace(gram))
    for rel in (0.0, 1e-12, 1e-10):
        try:
            return np.linalg.cholesky(gram + rel * trace * np.eye(gram.shape[0]))
        except np.linalg.LinAlgError:
            continue
    # report the first diagonal entry at which the leading minor breaks down
    for k in range(1, gram.shape[0] + 1):
        if np.linalg.eigvalsh(gram[:k, :k])[0] < -1e-10 * max(trace, 1.0):
            raise FactorizationError(f"Gram matrix not positive semidefinite at grid index {k - 1}")
    raise FactorizationError("Gram matrix could not be factorised")


def _ray_scales(cov: SuperposedCov, grid: TimeGrid) -> tuple[np.ndarray, np.ndarray]:
    """Outer scale ``v(t)`` and Brownian increments' std for the ray factorisation."""
    t = grid.points
    v = cov.big_theta - cov.big_t * t
    tol = 1e-12 * cov.big_theta
    bad = np.flatnonzero(v < -tol)
    if bad.size:
        raise FactorizationError(
            f"covariance s*(Theta - T*t) is not positive definite at t={t[bad[0]]:.17g} "
            f"(Theta - T*t = {v[bad[0]]:.3g})"
        )
    zero = np.flatnonzero(v <= tol)
    if zero.size and zero[0] != t.size - 1:
        raise FactorizationError(
            f"covariance degenerates at interior time t={t[zero[0]]:.17g}"
        )
    ratio = np.empty_like(t)
    ratio[: t.size - zero.size] = t[: t.size - zero.size] / v[: t.size - zero.size]
    dr = np.diff(ratio[: t.size - zero.size], prepend=0.0)
    std = np.sqrt(dr)
    if zero.size:
        v = v.copy()
        v[-1] = 0.0
        std = np.append(std, 0.0)
    return v, std


def ray_cholesky(cov: SuperposedCov, grid: TimeGrid) -> np.ndarray:
    """Explicit lower Cholesky factor ``L[i, j] = v(t_i) * std_j`` for ``j <= i``."""
    v, std = _ray_scales(cov, grid)
    return np.tril(v[:, None] * std[None, :])


def _ray_draw(cov: SuperposedCov, grid: TimeGrid, z: np.ndarray) -> np.ndarray:
    v, std = _ray_scales(cov, grid)
    return v * np.cumsum(z * std, axis=1)


def _as_cov(p) -> SuperposedCov:
    if isinstance(p, SuperposedCov):
        return p
    if isinstance(p, SuperpositionSpec):
        return superpose(p)
    return p.as_cov()


# ---------------------------------------------------------------------------
# samplers


def sample_ray(
    p: RayParams | SuperposedCov | SuperpositionSpec,
    grid: TimeGrid,
    n_paths: int,
    seed: int,
    workers: int = 1,
) -> SamplePathBatch:
    """Zero-mean ray paths with covariance ``s*(Theta - T*t)`` on ``grid``."""
    cov = _as_cov(p)
    grid.check_within(cov.horizon)
    _ray_scales(cov, grid)

    def block(a: int, b: int) -> np.ndarray:
        return _ray_draw(cov, grid, _normal_rows(seed, STREAM_GAUSS, a, b, len(grid)))

    return SamplePathBatch(grid, map_blocks(block, n_paths, workers), seed, False)


def sample_gaussian(
    kernel: Callable, grid: TimeGrid, n_paths: int, seed: int, stream: int = STREAM_GAUSS
) -> SamplePathBatch:
    """Zero-mean paths for an arbitrary covariance kernel via a jittered Cholesky factor."""
    chol = cholesky_with_jitter(gram_matrix(kernel, grid.points))

    def block(a: int, b: int) -> np.ndarray:
        return _normal_rows(seed, stream, a, b, len(grid)) @ chol.T

    return SamplePathBatch(grid, map_blocks(block, n_paths), seed, False)


def conditioned_net_input_law(
    spec: SuperpositionSpec, state: ConditionedState
) -> tuple[SuperposedCov, float]:
    return condition_superposition(spec, state)


def sample_conditioned_net_input(
    spec: SuperpositionSpec,
    state: ConditionedState,
    grid: TimeGrid,
    n_paths: int,
    seed: int,
    workers: int = 1,
) -> SamplePathBatch:
    """Paths of ``rho_ux*h + X_ux(h)``, the net input after ``u`` given the state."""
    cov, rho_ux = condition_superposition(spec, state)
    grid.check_within(cov.horizon)
    _ray_scales(cov, grid)
    drift = rho_ux * grid.points

    def block(a: int, b: int) -> np.ndarray:
        return _ray_draw(cov, grid, _normal_rows(seed, STREAM_GAUSS, a, b, len(grid))) + drift

    return SamplePathBatch(grid, map_blocks(block, n_paths, workers), seed, True)


def pinned_law(spec: SuperpositionSpec, w: float, z: float) -> tuple[SuperposedCov, float]:
    """Kernel ``s*(Theta - Theta*t/w)`` and slope ``z/w`` of the pinned net input."""
    big_theta = superpose(spec).big_theta
    return SuperposedCov(big_theta, big_theta / w, w), z / w


def sample_pinned(
    spec: SuperpositionSpec,
    state: ConditionedState,
    w: float,
    z: float,
    grid: TimeGrid,
    n_paths: int,
    seed: int,
    workers: int = 1,
) -> SamplePathBatch:
    """Net input over ``[u, u+w]`` given its total increment ``z`` over the window.

    Neither ``spec.rho`` nor ``state.x`` enters: pinning removes both.
    """
    if not 0 < w <= spec.big_delta - state.u:
        raise ValueError(f"window w={w} must lie in (0, big_delta - u]")
    cov, slope = pinned_law(spec, w, z)
    grid.check_within(w)
    drift = slope * grid.points
    v, std = _ray_scales(cov, grid)

    def block(a: int, b: int) -> np.ndarray:
        z_ = _normal_rows(seed, STREAM_GAUSS, a, b, len(grid))
        out = v * np.cumsum(z_ * std, axis=1) + drift
        if grid.points[-1] == w:
            out[:, -1] = z
        return out

    return SamplePathBatch(grid, map_blocks(block, n_paths, workers), seed, True)


# ---------------------------------------------------------------------------
# reflection


def reflect(net_input, v: float, lower_envelope=None) -> RegulatedPath:
    """One-sided reflection at zero of ``v + V`` on grid points.

    ``net_input`` holds ``V`` at the grid points (``V(0) = 0`` implicit), one
    path per row.  The running infimum is taken over grid points unless
    ``lower_envelope`` supplies, per grid point, the infimum of ``V`` over the
    preceding grid interval (see :func:`bridge_interval_minima`).
    """
    if v < 0:
        raise ValueError(f"initial level must be >= 0, got {v}")
    vals = np.asarray(net_input, dtype=float)
    lows = vals if lower_envelope is None else np.minimum(vals, lower_envelope)
    running = np.minimum(np.minimum.accumulate(lows, axis=-1), 0.0)
    l = np.maximum(-(v + running), 0.0)
    q = v + vals + l
    return RegulatedPath(np.maximum(q, 0.0), l)


def bridge_interval_minima(
    values: np.ndarray, grid: TimeGrid, variance_rate: float, seed: int, start: int = 0
) -> np.ndarray:
    """Exact minima of a rate-``variance_rate`` Brownian bridge between grid values.

    Conditional on its grid values a ray is, on each grid interval, a Brownian
    bridge with variance rate ``Theta`` (any ray is a rate-``Theta`` bridge
    pinned at ``Theta/T``).  The minimum over an interval of length ``dt``
    between values ``a`` and ``b`` is ``(a + b - sqrt((b-a)**2 - 2*rate*dt*log U))/2``.
    Row ``k`` of ``values`` is treated as path ``start + k`` for seeding.
    """
    values = np.asarray(values, dtype=float)
    prev = np.concatenate([np.zeros((values.shape[0], 1)), values[:, :-1]], axis=1)
    u = _uniform_rows(seed, STREAM_BRIDGE_MIN, start, start + values.shape[0], values.shape[1])
    spread = (values - prev) ** 2 - 2.0 * variance_rate * grid.steps * np.log1p(-u)
    return 0.5 * (prev + values - np.sqrt(spread))


def terminal_queue(
    net_input_sampler: Callable[[int, int], np.ndarray],
    grid: TimeGrid,
    v: float,
    n_paths: int,
    seed: int,
    variance_rate: float | None = None,
    workers: int = 1,
) -> np.ndarray:
    """Queue level at the last grid point for each path, streaming in blocks.

    ``net_input_sampler(start, stop)`` returns net-input rows for paths
    ``start..stop-1``.  When ``variance_rate`` is given the running infimum
    also includes the exact between-point bridge minima.
    """

    def block(a: int, b: int) -> np.ndarray:
        vals = net_input_sampler(a, b)
        env = None
        if variance_rate is not None:
            env = bridge_interval_minima(vals, grid, variance_rate, seed, a)
        return reflect(vals, v, env).q[:, -1]

    return map_blocks(block, n_paths, workers)


def conditioned_queue_terminal(
    spec: SuperpositionSpec,
    state: ConditionedState,
    grid: TimeGrid,
    n_paths: int,
    seed: int,
    exact_minimum: bool = True,
    workers: int = 1,
) -> np.ndarray:
    """Simulated ``Q(u + grid[-1])`` given the conditioned state."""
    cov, rho_ux = condition_superposition(spec, state)
    grid.check_within(cov.horizon)
    drift = rho_ux * grid.points

    def sampler(a: int, b: int) -> np.ndarray:
        return _ray_draw(cov, grid, _normal_rows(seed, STREAM_GAUSS, a, b, len(grid))) + drift

    rate = cov.big_theta if exact_minimum else None
    return terminal_queue(sampler, grid, state.v, n_paths, seed, rate, workers)


def pinned_queue_terminal(
    spec: SuperpositionSpec,
    state: ConditionedState,
    w: float,
    z: float,
    grid: TimeGrid,
    n_paths: int,
    seed: int,
    exact_minimum: bool = True,
    workers: int = 1,
) -> np.ndarray:
    """Simulated queue at ``u + grid[-1]`` given the window increment ``z``."""
    cov, slope = pinned_law(spec, w, z)
    grid.check_within(w)
    drift = slope * grid.points
    v, std = _ray_scales(cov, grid)
    at_end = grid.points[-1] == w

    def sampler(a: int, b: int) -> np.ndarray:
        out = v * np.cumsum(_normal_rows(seed, STREAM_GAUSS, a, b, len(grid)) * std, axis=1) + drift
        if at_end:
            out[:, -1] = z
        return out

    rate = cov.big_theta if exact_minimum else None
    return terminal_queue(sampler, grid, state.v, n_paths, seed, rate, workers)


# ---------------------------------------------------------------------------
# embedded half-line processes


@dataclass(frozen=True)
class EmbeddedSpec:
    """Half-line process: Brownian motion plus periodically extended bridges.

    ``bridges`` holds ``(phi, period)`` pairs; each bridge has covariance
    ``phi*(s/period)*(1 - t/period)`` on one period and repeats.
    """

    motion_rate: float = 0.0
    bridges: tuple[tuple[float, float], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bridges", tuple((float(a), float(b)) for a, b in self.bridges))
        if self.motion_rate < 0:
            raise ValueError("motion_rate must be >= 0")
        if not self.bridges:
            raise ValueError("at least one periodic bridge is required")
        for phi, period in self.bridges:
            if phi <= 0 or period <= 0:
                raise ValueError("bridge phi and period must be > 0")
        periods = [p for _, p in self.bridges]
        if len(set(periods)) != len(periods):
            raise ValueError("bridge periods must be distinct")

    @property
    def kind(self) -> str:
        if len(self.bridges) > 1:
            return "motion_plus_multi_bridges"
        return "periodic_bridge" if self.motion_rate == 0 else "motion_plus_periodic_bridge"

    def matched_ray(self, big_delta: float) -> RayParams:
        """Ray law of every increment window of length ``big_delta``."""
        theta = self.motion_rate + sum(phi / p for phi, p in self.bridges)
        tau = sum(phi / (p * p) for phi, p in self.bridges)
        if big_delta > min(p for _, p in self.bridges):
            raise ValueError("window length must not exceed the shortest bridge period")
        return RayParams(theta * theta / tau, theta / tau, big_delta)

    def kernel(self, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        out = self.motion_rate * np.minimum(s, t)
        for phi, period in self.bridges:
            a, b = np.mod(s, period), np.mod(t, period)
            lo, hi = np.minimum(a, b), np.maximum(a, b)
            out = out + phi * (lo / period) * (1.0 - hi / period)
        return out


EMBEDDED_KINDS = ("periodic_bridge", "motion_plus_periodic_bridge", "motion_plus_multi_bridges")


def sample_embedded(
    kind: str, params: EmbeddedSpec, grid: TimeGrid, n_paths: int, seed: int
) -> SamplePathBatch:
    """Sample the half-line process on an arbitrary grid.

    The Gram matrix is singular whenever two grid points coincide modulo a
    period, which is exactly what the jittered Cholesky factor absorbs.
    """
    if kind not in EMBEDDED_KINDS:
        raise ValueError(f"unknown embedded kind {kind!r}; expected one of {EMBEDDED_KINDS}")
    if kind != params.kind and not (kind == "motion_plus_periodic_bridge" and params.kind == "periodic_bridge"):
        raise ValueError(f"parameters describe a {params.kind!r} process, not {kind!r}")
    return sample_gaussian(params.kernel, grid, n_paths, seed)


# ---------------------------------------------------------------------------
# empirical distribution helpers


def empirical_cdf(batch: SamplePathBatch | np.ndarray, at_index: int = -1) -> Callable:
    """Right-continuous empirical CDF of the values at grid index ``at_index``."""
    vals = batch.values[:, at_index] if isinstance(batch, SamplePathBatch) else np.asarray(batch)
    vals = np.sort(np.asarray(vals, dtype=float).ravel())
    if vals.size == 0:
        raise ValueError("empirical CDF of an empty sample")
    n = vals.size

    def cdf(x):
        return np.searchsorted(vals, x, side="right") / n

    cdf.samples = vals
    return cdf


def ks_distance(samples, cdf: Callable) -> float:
    """Kolmogorov-Smirnov statistic ``sup |F_n - F|`` evaluated at the sample points."""
    if callable(samples) and hasattr(samples, "samples"):
        samples = samples.samples
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("KS distance of an empty sample")
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    # ties: F_n jumps once per distinct value
    upper = np.searchsorted(x, x, side="right") / n
    lower = np.searchsorted(x, x, side="left") / n
    return float(max(np.max(upper - f), np.max(f - lower)))


def ks_critical(n: int, alpha: float = 0.01) -> float:
    """Asymptotic KS critical value ``sqrt(-log(alpha/2)/2)/sqrt(n)``."""
    return math.sqrt(-0.5 * math.log(alpha / 2)) / math.sqrt(n)
