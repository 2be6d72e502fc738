import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from brownian_rays.core_process import (
    ConditionedState,
    RayComponent,
    RayParams,
    SuperposedCov,
    SuperpositionSpec,
    gram_matrix,
    ray_cov,
)
from brownian_rays.sampler import (
    EmbeddedSpec,
    FactorizationError,
    SamplePathBatch,
    TimeGrid,
    bridge_interval_minima,
    cholesky_with_jitter,
    conditioned_queue_terminal,
    empirical_cdf,
    ks_critical,
    ks_distance,
    ray_cholesky,
    reflect,
    sample_conditioned_net_input,
    sample_embedded,
    sample_gaussian,
    sample_pinned,
    sample_ray,
)

MIXED = SuperpositionSpec(
    (RayComponent(1.0, RayParams(1.0, 1.5, 1.0)), RayComponent(0.5, RayParams(3.0, 8.0, 1.0))),
    rho=0.2,
)


# -- grid -------------------------------------------------------------------


@pytest.mark.parametrize("pts", [[0.0, 0.5], [0.5, 0.5], [0.6, 0.3], []])
def test_grid_rejects_bad_points(pts):
    with pytest.raises(ValueError):
        TimeGrid(pts)


def test_grid_outside_horizon_rejected():
    with pytest.raises(ValueError):
        sample_ray(RayParams(1.0, 2.0, 1.0), TimeGrid([0.5, 1.5]), 4, 0)


# -- factorisation ----------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(1.0, 100.0), st.integers(1, 30))
def test_ray_cholesky_matches_numpy(phi, ratio, n):
    p = RayParams(phi, ratio, 1.0)
    grid = TimeGrid.uniform(1.0 if ratio > 1.0 + 1e-9 else 0.999, n)
    gram = gram_matrix(lambda s, t: ray_cov(p, s, t), grid.points)
    ours = ray_cholesky(p.as_cov(), grid)
    np.testing.assert_allclose(ours @ ours.T, gram, rtol=1e-10, atol=1e-13)
    np.testing.assert_allclose(ours, np.linalg.cholesky(gram), rtol=1e-8, atol=1e-10)


def test_bridge_end_point_has_zero_variance():
    grid = TimeGrid.uniform(1.0, 4)
    batch = sample_ray(RayParams(1.0, 1.0, 1.0), grid, 50, 3)
    assert np.all(batch.values[:, -1] == 0.0)


def test_factorisation_error_names_the_time():
    with pytest.raises(FactorizationError, match="t=2"):
        sample_ray(SuperposedCov(1.0, 1.0), TimeGrid([0.5, 2.0]), 4, 0)


def test_factorisation_error_on_interior_degeneracy():
    with pytest.raises(FactorizationError, match="interior"):
        sample_ray(SuperposedCov(1.0, 1.0), TimeGrid([0.5, 1.0, 1.0 + 1e-14]), 4, 0)


def test_jitter_rescues_singular_gram():
    gram = np.array([[1.0, 1.0], [1.0, 1.0]])
    chol = cholesky_with_jitter(gram)
    np.testing.assert_allclose(chol @ chol.T, gram, atol=1e-9)


def test_jitter_reports_indefinite_gram():
    with pytest.raises(FactorizationError, match="index 1"):
        cholesky_with_jitter(np.array([[1.0, 2.0], [2.0, 1.0]]))


# -- moments ----------------------------------------------------------------


def test_sample_ray_moments():
    grid = TimeGrid([0.2, 0.5, 0.9])
    batch = sample_ray(MIXED, grid, 40000, 11)
    cov = gram_matrix(lambda s, t: _mixed_kernel(s, t), grid.points)
    emp = np.cov(batch.values, rowvar=False)
    se = np.sqrt((cov**2 + np.outer(np.diag(cov), np.diag(cov))) / 40000)
    assert np.all(np.abs(emp - cov) < 5 * se)
    assert np.all(np.abs(batch.values.mean(axis=0)) < 5 * np.sqrt(np.diag(cov) / 40000))


def _mixed_kernel(s, t):
    return sum(c.weight**2 * ray_cov(c.params, s, t) for c in MIXED.components)


def test_conditioned_net_input_mean_carries_drift():
    state = ConditionedState(0.3, (0.2, -0.4), 1.0)
    grid = TimeGrid([0.35, 0.7])
    batch = sample_conditioned_net_input(MIXED, state, grid, 20000, 5)
    rho_ux = MIXED.rho - (1.0 * 0.2 / (1.5 - 0.3) + 0.5 * -0.4 / (8.0 - 0.3))
    assert batch.drift_applied
    sd = batch.values.std(axis=0) / math.sqrt(20000)
    assert np.all(np.abs(batch.values.mean(axis=0) - rho_ux * grid.points) < 5 * sd)


def test_sample_gaussian_matches_kernel():
    grid = TimeGrid([0.3, 0.6, 1.0])
    k = lambda s, t: np.minimum(s, t)  # noqa: E731
    batch = sample_gaussian(k, grid, 30000, 2)
    np.testing.assert_allclose(np.cov(batch.values, rowvar=False), gram_matrix(k, grid.points), atol=0.03)


# -- determinism ------------------------------------------------------------


def test_path_depends_only_on_seed_and_index():
    grid = TimeGrid.uniform(1.0, 6)
    small = sample_ray(MIXED, grid, 10, 99).values
    large = sample_ray(MIXED, grid, 3000, 99).values
    threaded = sample_ray(MIXED, grid, 3000, 99, workers=4).values
    np.testing.assert_array_equal(small, large[:10])
    np.testing.assert_array_equal(large, threaded)
    assert not np.array_equal(large, sample_ray(MIXED, grid, 3000, 100).values)


def test_batch_values_are_read_only():
    batch = sample_ray(MIXED, TimeGrid([0.5]), 3, 1)
    with pytest.raises(ValueError):
        batch.values[0, 0] = 1.0


def test_queue_terminal_deterministic_across_workers():
    state = ConditionedState.initial(2, 0.5)
    grid = TimeGrid.uniform(0.8, 16)
    a = conditioned_queue_terminal(MIXED, state, grid, 5000, 7)
    b = conditioned_queue_terminal(MIXED, state, grid, 5000, 7, workers=3)
    np.testing.assert_array_equal(a, b)


# -- reflection -------------------------------------------------------------


def test_reflect_no_regulation():
    r = reflect(np.array([[-1.0, -2.0]]), 5.0)
    np.testing.assert_array_equal(r.q, [[4.0, 3.0]])
    np.testing.assert_array_equal(r.l, [[0.0, 0.0]])


def test_reflect_hits_zero():
    r = reflect(np.array([[-2.0, -1.0]]), 1.0)
    np.testing.assert_array_equal(r.q, [[0.0, 1.0]])
    np.testing.assert_array_equal(r.l, [[1.0, 1.0]])


def test_reflect_rejects_negative_level():
    with pytest.raises(ValueError):
        reflect(np.zeros((1, 2)), -0.1)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6), st.floats(0, 5))
def test_reflect_matches_brute_force(vals, v):
    path = np.array(vals)
    r = reflect(path[None, :], v)
    for i in range(len(vals)):
        # regulator: smallest nondecreasing push keeping v + V + l >= 0
        l_ref = max([0.0] + [-(v + path[j]) for j in range(i + 1)])
        assert r.l[0, i] == pytest.approx(l_ref, abs=1e-12)
        assert r.q[0, i] == pytest.approx(v + path[i] + l_ref, abs=1e-12)
    assert np.all(r.q >= 0)
    assert np.all(np.diff(r.l[0]) >= 0)
    # l only grows while the queue sits at zero
    grow = np.diff(np.concatenate([[0.0], r.l[0]])) > 0
    assert np.all(r.q[0][grow] == pytest.approx(0.0, abs=1e-12))


def test_bridge_minima_lie_below_endpoints():
    vals = sample_ray(MIXED, TimeGrid.uniform(1.0, 8), 500, 4).values
    env = bridge_interval_minima(vals, TimeGrid.uniform(1.0, 8), MIXED.components[0].params.theta, 4)
    prev = np.concatenate([np.zeros((500, 1)), vals[:, :-1]], axis=1)
    assert np.all(env <= np.minimum(prev, vals) + 1e-12)


def test_bridge_minimum_law():
    # standard bridge from 0 to 0 over unit time: P(min < -m) = exp(-2 m^2)
    env = bridge_interval_minima(np.zeros((20000, 1)), TimeGrid([1.0]), 1.0, 8)[:, 0]
    stat = stats.kstest(-env, lambda m: 1 - np.exp(-2 * np.maximum(m, 0) ** 2)).statistic
    assert stat < ks_critical(20000)


# -- pinned -----------------------------------------------------------------


def test_pinned_endpoint_exact_and_rho_x_ignored():
    grid = TimeGrid([0.1, 0.25, 0.4])
    state_a = ConditionedState(0.2, (0.0, 0.0), 1.0)
    state_b = ConditionedState(0.2, (3.0, -1.0), 1.0)
    spec_b = SuperpositionSpec(MIXED.components, rho=7.0)
    a = sample_pinned(MIXED, state_a, 0.4, -0.3, grid, 200, 5)
    b = sample_pinned(spec_b, state_b, 0.4, -0.3, grid, 200, 5)
    assert np.max(np.abs(a.values[:, -1] + 0.3)) < 1e-8
    np.testing.assert_array_equal(a.values, b.values)


def test_pinned_rejects_long_window():
    with pytest.raises(ValueError):
        sample_pinned(MIXED, ConditionedState(0.5, (0, 0)), 0.6, 0.0, TimeGrid([0.3]), 2, 0)


def test_pinned_interior_moments():
    grid = TimeGrid([0.25, 0.5])
    w, z = 0.5, 1.0
    big_theta = sum(c.weight**2 * c.params.theta for c in MIXED.components)
    vals = sample_pinned(MIXED, ConditionedState.initial(2), w, z, grid, 40000, 6).values[:, 0]
    assert abs(vals.mean() - z * 0.25 / w) < 5 * vals.std() / 200
    assert vals.var() == pytest.approx(0.25 * big_theta * (1 - 0.25 / w), rel=0.03)


# -- embedded ---------------------------------------------------------------


EMB = {
    "periodic_bridge": EmbeddedSpec(0.0, ((1.0, 1.0),)),
    "motion_plus_periodic_bridge": EmbeddedSpec(0.5, ((1.0, 1.0),)),
    "motion_plus_multi_bridges": EmbeddedSpec(0.5, ((1.0, 1.0), (2.0, 1.7))),
}


@pytest.mark.parametrize("kind", sorted(EMB))
def test_embedded_windows_have_ray_covariance(kind):
    spec = EMB[kind]
    big_delta = 0.8
    ray = spec.matched_ray(big_delta)
    pts = np.linspace(0.1, big_delta, 5)
    for t0 in (0.0, 0.37, 2.9):
        s, t = np.meshgrid(pts, pts, indexing="ij")
        incr = spec.kernel(t0 + s, t0 + t) - spec.kernel(t0, t0 + t) - spec.kernel(t0 + s, t0) + spec.kernel(t0, t0)
        np.testing.assert_allclose(incr, ray_cov(ray, s, t), rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("kind", sorted(EMB))
def test_embedded_sampler_covariance(kind):
    grid = TimeGrid([0.4, 1.0, 1.4, 2.0])  # period-aligned points make the Gram singular
    batch = sample_embedded(kind, EMB[kind], grid, 30000, 12)
    gram = gram_matrix(EMB[kind].kernel, grid.points)
    np.testing.assert_allclose(np.cov(batch.values, rowvar=False), gram, atol=0.06)


def test_embedded_kind_checks():
    with pytest.raises(ValueError):
        sample_embedded("periodic_bridge", EMB["motion_plus_periodic_bridge"], TimeGrid([0.5]), 2, 0)
    with pytest.raises(ValueError):
        sample_embedded("nonsense", EMB["periodic_bridge"], TimeGrid([0.5]), 2, 0)
    with pytest.raises(ValueError):
        EMB["periodic_bridge"].matched_ray(1.5)


# -- empirical helpers ------------------------------------------------------


def test_empirical_cdf_and_ks_agree_with_scipy():
    x = np.random.default_rng(0).normal(size=500)
    f = empirical_cdf(x)
    assert f(np.inf) == 1.0 and f(-np.inf) == 0.0
    assert ks_distance(f, stats.norm.cdf) == pytest.approx(stats.kstest(x, "norm").statistic, abs=1e-15)


def test_ks_distance_handles_ties():
    x = np.array([0.0, 0.0, 0.0, 1.0])
    # atom of mass 3/4 at zero against a continuous uniform on [0, 1]
    assert ks_distance(x, lambda y: np.clip(y, 0, 1)) == pytest.approx(0.75)


def test_empirical_cdf_from_batch():
    batch = SamplePathBatch(TimeGrid([1.0, 2.0]), np.array([[0.0, 1.0], [0.0, 3.0]]), 0, False)
    f = empirical_cdf(batch)
    assert f(2.0) == 0.5 and f(3.0) == 1.0


def test_ks_critical_value():
    assert ks_critical(100000) == pytest.approx(1.6276 / math.sqrt(100000), rel=1e-3)
