"""Modulus, Skorokhod distances, Aldous tables and tightness diagnostics"""

from dataclasses import replace

import numpy as np
import pytest

from ..analysis.aldous import (StoppingRule, aldous_estimate, aldous_moment_estimate, poisson_test_paths,
                               wilson_interval)
from ..analysis.modulus import modulus, modulus_bruteforce, modulus_curve
from ..analysis.paths import RealCadlagPath, StatePath, as_state_path, candidate_times, weak_projection_path
from ..analysis.skorokhod import (q_r, skorokhod_bruteforce, skorokhod_distance, uniform_distance,
                                  weak_ball_metric)
from ..analysis.tightness import compactness_statistics, tightness_report
from ..galerkin.solver import simulate_path
from ..spectral.field import SpectralField
from ..utils.errors import BallViolation, ConfigurationError, InsufficientData


def test_state_path_validation():
    with pytest.raises(ConfigurationError):
        StatePath(np.array([0.1, 0.5]), np.zeros(2), 1.0)
    with pytest.raises(ConfigurationError):
        StatePath(np.array([0.0, 0.5, 0.5]), np.zeros(3), 1.0)
    with pytest.raises(ConfigurationError):
        StatePath(np.array([0.0, 2.0]), np.zeros(2), 1.0)


def test_step_path_values_are_right_continuous():
    path = RealCadlagPath.with_jumps(1.0, [(0.5, 1.0), (0.25, 2.0)])
    assert np.allclose(path.values, [0.0, 2.0, 3.0])
    assert path.value_at(0.25)[0] == 2.0
    assert path.value_at(0.2499)[0] == 0.0
    assert path.diameter() == 3.0


def test_candidate_times_with_refinement():
    path = RealCadlagPath.with_jumps(1.0, [(0.3, 1.0)])
    assert np.allclose(candidate_times(path), [0.0, 0.3, 1.0])
    assert np.allclose(candidate_times(path, refine=4), [0.0, 0.25, 0.3, 0.5, 0.75, 1.0])


def test_modulus_of_a_single_jump():
    path = RealCadlagPath.with_jumps(1.0, [(0.5, 1.0)])
    assert modulus(path, 0.5) == 0.0
    assert modulus(path, 0.6) == 1.0


def test_modulus_with_close_jumps():
    path = RealCadlagPath.with_jumps(1.0, [(0.3, 1.0), (0.4, 2.0)])
    assert modulus(path, 0.2) == pytest.approx(1.0)
    assert modulus(path, 0.05) == 0.0


def test_modulus_matches_bruteforce():
    rng = np.random.default_rng(11)
    for _ in range(15):
        jumps = [(float(t), float(s)) for t, s in zip(rng.uniform(0.01, 1.0, 7), rng.normal(size=7))]
        path = RealCadlagPath.with_jumps(1.0, jumps, start=float(rng.normal()))
        for delta in (0.05, 0.15, 0.3, 0.6):
            assert modulus(path, delta) == pytest.approx(modulus_bruteforce(path, delta), abs=1e-12)


@pytest.mark.slow
def test_modulus_equals_bruteforce_on_1000_paths():
    rng = np.random.default_rng(23)
    for _ in range(1000):
        count = int(rng.integers(0, 11))
        jumps = [(float(t), float(s)) for t, s in zip(rng.uniform(0.01, 1.0, count), rng.normal(size=count))]
        path = RealCadlagPath.with_jumps(1.0, jumps, start=float(rng.normal()))
        assert len(candidate_times(path)) - 2 <= 12
        delta = float(rng.uniform(0.02, 0.6))
        assert modulus(path, delta) == modulus_bruteforce(path, delta)


def test_modulus_bruteforce_limit():
    path = RealCadlagPath.with_jumps(1.0, [(t, 1.0) for t in np.linspace(0.05, 0.95, 20)])
    with pytest.raises(InsufficientData):
        modulus_bruteforce(path, 0.1)


def test_modulus_rejects_bad_delta():
    path = RealCadlagPath.constant(1.0, 1.0)
    with pytest.raises(ConfigurationError):
        modulus(path, 0.0)
    with pytest.raises(ConfigurationError):
        modulus(path, 1.5)


def test_modulus_curve_is_monotone(additive_config):
    path = simulate_path(additive_config)
    curve = modulus_curve(path, [0.1, 0.5, 0.25, 0.05])
    assert list(curve.deltas) == [0.5, 0.25, 0.1, 0.05]
    assert curve.is_monotone
    assert curve.values[1] == pytest.approx(modulus(path, 0.25))


def test_galerkin_path_in_several_spaces(heat_config):
    path = simulate_path(heat_config)
    h_view = as_state_path(path, "H")
    v_view = as_state_path(path, "V")
    u_view = as_state_path(path, "Uprime")
    assert np.allclose(np.linalg.norm(v_view.points, axis=1), np.sqrt(2.0) * np.linalg.norm(h_view.points, axis=1))
    assert np.all(np.linalg.norm(u_view.points, axis=1) < np.linalg.norm(h_view.points, axis=1))
    with pytest.raises(ConfigurationError):
        as_state_path(path, "L4")


def test_weak_projection_of_heat_decay(heat_config):
    path = simulate_path(heat_config)
    projection = weak_projection_path(path, SpectralField.mode(heat_config.basis, 0))
    assert np.allclose(projection.values, np.exp(-projection.times))


def test_skorokhod_of_constant_paths():
    u = RealCadlagPath.constant(1.0, 1.0)
    v = RealCadlagPath.constant(-0.5, 1.0)
    assert skorokhod_distance(u, v) == pytest.approx(1.5)
    assert uniform_distance(u, v) == pytest.approx(1.5)


def test_skorokhod_of_shifted_jump():
    u = RealCadlagPath.with_jumps(1.0, [(0.5, 1.0)])
    v = RealCadlagPath.with_jumps(1.0, [(0.55, 1.0)])
    distance, terms = skorokhod_distance(u, v, details=True)
    assert uniform_distance(u, v) == pytest.approx(1.0)
    assert 0.05 - 1e-12 <= distance <= 0.05 + abs(np.log(0.9)) + 1e-12
    assert terms["sup_distance"] == pytest.approx(0.0)
    assert distance == pytest.approx(skorokhod_bruteforce(u, v), abs=1e-12)


def test_skorokhod_matches_bruteforce_and_uniform_bound():
    rng = np.random.default_rng(5)
    for _ in range(6):
        u = RealCadlagPath.with_jumps(1.0, [(float(t), float(s)) for t, s in zip(rng.uniform(0.05, 0.95, 2),
                                                                                  rng.normal(size=2))])
        v = RealCadlagPath.with_jumps(1.0, [(float(t), float(s)) for t, s in zip(rng.uniform(0.05, 0.95, 2),
                                                                                  rng.normal(size=2))])
        fast = skorokhod_distance(u, v, max_knots=2)
        assert fast == pytest.approx(skorokhod_bruteforce(u, v, max_knots=2), abs=1e-12)
        assert fast <= uniform_distance(u, v) + 1e-12
        assert skorokhod_distance(u, u) == pytest.approx(0.0)


def test_q_r_metric():
    e1 = np.array([1.0, 0.0, 0.0])
    zero = np.zeros(3)
    assert q_r(e1, zero) == pytest.approx(0.25)
    assert q_r(e1, e1) == 0.0
    assert q_r(np.array([0.0, 0.0, 1.0]), zero) == pytest.approx(1.0 / 16.0)
    # bounded by sum 2^-k
    assert q_r(np.full(3, 1e9), zero) < 1.0


def test_weak_ball_metric(heat_config):
    path = simulate_path(heat_config)
    assert weak_ball_metric(path, path, r=1.0) == pytest.approx(0.0)
    with pytest.raises(BallViolation):
        weak_ball_metric(path, path, r=0.5)


def test_stopping_rules():
    assert StoppingRule.parse("deterministic:0,0.5").times == (0.0, 0.5)
    assert StoppingRule.parse("hitting:1.5").level == 1.5
    with pytest.raises(ConfigurationError):
        StoppingRule.parse("random:1")
    path = RealCadlagPath.with_jumps(1.0, [(0.2, 1.0), (0.7, 1.0)])
    assert StoppingRule.hitting(1.5).stopping_times(path) == [0.7]
    assert StoppingRule.hitting(5.0).stopping_times(path) == [1.0]


def test_aldous_probability_of_poisson_paths():
    paths = poisson_test_paths(rate=2.0, horizon=1.0, count=2000, seed=3)
    thetas = [0.0, 0.1, 0.25]
    table = aldous_estimate(paths, StoppingRule.deterministic([0.0]), thetas, [1.0])
    expected = 1.0 - np.exp(-2.0 * np.array(thetas))
    assert np.allclose(table.probabilities[:, 0], expected, atol=0.04)
    assert table.probabilities[0, 0] == 0.0
    assert np.all(table.ci_low[:, 0] <= table.probabilities[:, 0])
    assert np.all(table.probabilities[:, 0] <= table.ci_high[:, 0])
    assert table.excess_mass == 0.0


@pytest.mark.slow
def test_aldous_table_of_poisson_paths_within_three_sigma():
    paths = poisson_test_paths(rate=2.0, horizon=1.0, count=10_000, seed=4)
    thetas = np.array([0.0, 0.05, 0.1, 0.25, 0.5])
    table = aldous_estimate(paths, StoppingRule.deterministic([0.0]), thetas, [1.0])
    expected = 1.0 - np.exp(-2.0 * thetas)
    sigma = np.sqrt(expected * (1.0 - expected) / len(paths))
    assert np.all(np.abs(table.probabilities[:, 0] - expected) <= 3.0 * sigma)
    assert table.excess_mass == 0.0


def test_aldous_reads_late_times_at_horizon():
    paths = poisson_test_paths(rate=1.0, horizon=1.0, count=20)
    table = aldous_estimate(paths, StoppingRule.deterministic([0.9]), [0.0, 0.5], [0.5])
    assert table.excess_mass == pytest.approx(0.5)
    assert len(table.rows()) == 2


def test_aldous_moment_fit_on_poisson_paths():
    paths = poisson_test_paths(rate=2.0, horizon=1.0, count=2000, seed=8)
    result = aldous_moment_estimate(paths, StoppingRule.deterministic([0.0]), [0.1, 0.2, 0.4], alpha=1.0,
                                    etas=[1.0])
    # E N(theta) = 2 theta
    assert result["beta"] == pytest.approx(1.0, abs=0.1)
    assert result["C"] == pytest.approx(2.0, rel=0.15)
    assert np.array(result["bounds"]).shape == (3, 1)


def test_wilson_interval_contains_estimate():
    low, high = wilson_interval(30, 100)
    assert low < 0.3 < high
    assert wilson_interval(0, 50)[0] == pytest.approx(0.0, abs=1e-12)


def test_tightness_of_a_constant_ensemble(heat_config):
    cfg = replace(heat_config, u0=np.zeros(4))
    paths = [simulate_path(cfg.with_seed(s)) for s in range(3)]
    report = tightness_report(paths, q=2.0, deltas=[0.5, 0.1], eps=0.1)
    assert report.verdict
    assert report.threshold == 0.0
    assert report.modulus_curve.values.tolist() == [0.0, 0.0]
    summary = report.to_dict()
    assert summary["verdict"] and summary["curve_monotone"]


def test_tightness_flags_and_bounds(additive_config):
    paths = [simulate_path(additive_config.with_seed(s)) for s in range(4)]
    report = tightness_report(paths, q=2.0, deltas=[0.5, 0.25], eps=0.25, sup_bound=1e-6)
    assert not report.condition_a
    assert report.condition_b
    assert report.sup_h_norm == pytest.approx(max(p.sup_h_norm() for p in paths))
    with pytest.raises(InsufficientData):
        tightness_report([], q=2.0, deltas=[0.5], eps=0.1)


def test_compactness_statistics():
    paths = [RealCadlagPath.with_jumps(1.0, [(0.5, 1.0)]), RealCadlagPath.with_jumps(1.0, [(0.5, -2.0)])]
    stats = compactness_statistics(paths, [0.5, 0.75])
    assert stats["uniform_bound"] == 2.0
    assert stats["modulus_sup"]["values"] == [2.0, 0.0]
