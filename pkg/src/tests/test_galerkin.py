"""Jump-adapted integration, stopping, weak-form identity and ensembles"""

from dataclasses import replace

import numpy as np
import pytest

from ..galerkin.config import ForcingTable, GalerkinConfig, initial_field
from ..galerkin.ensemble import simulate_ensemble
from ..galerkin.path import GRID, JUMP, KIND_NAMES, STOP, interpolant_weights
from ..galerkin.solver import GalerkinSolver, simulate_path, step, weak_form_residual, weak_form_residuals
from ..noise.coefficients import build_noise
from ..noise.marks import AtomicMarks
from ..noise.poisson import JumpStream, sample_jumps
from ..spectral.field import SpectralField
from ..utils.errors import ConfigurationError, IngestionError


def test_heat_decay_is_exact_on_the_grid(heat_config):
    path = simulate_path(heat_config)
    grid = path.grid_mask
    assert np.allclose(path.times[grid], np.linspace(0.0, 1.0, 11))
    expected = np.exp(-path.times[grid])[:, None] * heat_config.u0[None, :]
    assert np.allclose(path.states[grid], expected, rtol=1e-12, atol=1e-15)
    assert not path.stopped
    assert path.jump_count == 0


def test_heat_decay_of_higher_modes(basis):
    u0 = np.zeros(basis.size)
    u0[-1] = 2.0
    cfg = GalerkinConfig(basis, n=basis.size, T=0.5, dt=0.25, u0=u0, include_convection=False)
    final = simulate_path(cfg).final_state
    assert final[-1] == pytest.approx(2.0 * np.exp(-4.0 * 0.5), rel=1e-12)
    assert np.allclose(final[:-1], 0.0)


def test_config_rejects_bad_level_and_grid(unit_basis):
    with pytest.raises(ConfigurationError):
        GalerkinConfig(unit_basis, n=5, T=1.0, dt=0.1, u0=np.zeros(4))
    with pytest.raises(ConfigurationError):
        GalerkinConfig(unit_basis, n=4, T=1.0, dt=0.0, u0=np.zeros(4))
    with pytest.raises(ConfigurationError):
        GalerkinConfig(unit_basis, n=4, T=1.0, dt=0.1, u0=np.array([np.inf, 0, 0, 0]))


def test_initial_state_is_projected(basis):
    cfg = GalerkinConfig(basis, n=3, T=1.0, dt=0.5, u0=np.arange(1.0, 13.0))
    assert np.array_equal(cfg.u0, [1.0, 2.0, 3.0])


def test_single_step_matches_solver(heat_config):
    state = step(heat_config, heat_config.u0, 0.0, 0.1)
    assert np.allclose(state, np.exp(-0.1) * heat_config.u0)


def test_path_records_are_time_ordered(additive_config):
    path = simulate_path(additive_config)
    assert np.all(np.diff(path.times) >= 0)
    assert path.times[0] == 0.0 and path.times[-1] == pytest.approx(1.0)
    assert path.jump_count == int(np.sum(path.kinds == JUMP))
    jumps = np.nonzero(path.kinds == JUMP)[0]
    for k in jumps:
        size = path.states[k] - path.left[k]
        assert np.allclose(size, additive_config.noise.jump(path.times[k], path.left[k], path.marks[k]))


def test_simulation_is_reproducible(additive_config):
    first = simulate_path(additive_config)
    second = simulate_path(additive_config)
    assert np.array_equal(first.states, second.states)
    assert np.array_equal(first.times, second.times)
    third = simulate_path(additive_config.with_seed(6))
    assert not np.array_equal(first.states, third.states)


def test_zero_size_jump_leaves_grid_values_unchanged(additive_config):
    jumps = sample_jumps(additive_config.noise.marks, additive_config.T, additive_config.seed)
    plain = simulate_path(replace(additive_config, jumps=jumps))
    extra = simulate_path(replace(additive_config, jumps=jumps.with_event(0.4321, [0.0])))
    assert extra.jump_count == plain.jump_count + 1
    assert np.allclose(extra.states[extra.grid_mask], plain.states[plain.grid_mask], rtol=0, atol=1e-14)


def test_weak_form_residual_vanishes(additive_config):
    path = simulate_path(additive_config)
    assert weak_form_residual(path) < 1e-10
    v = SpectralField.mode(additive_config.basis, 2)
    assert np.max(weak_form_residuals(path, v)) < 1e-10


def test_weak_form_with_forcing_and_stop(unit_basis):
    cfg = GalerkinConfig(unit_basis, n=4, T=2.0, dt=0.05, u0=np.array([0.1, 0.0, 0.0, 0.0]),
                         forcing=ForcingTable.constant([5.0, 0.0, 1.0, 0.0]), R_stop=1.0)
    path = simulate_path(cfg)
    assert weak_form_residual(path) < 1e-10


def test_weak_form_test_function_outside_span(additive_config):
    path = simulate_path(additive_config)
    with pytest.raises(ConfigurationError):
        weak_form_residuals(path, SpectralField.mode(additive_config.basis, 8))


def test_stopping_at_first_exit(unit_basis):
    cfg = GalerkinConfig(unit_basis, n=4, T=2.0, dt=0.05, u0=np.array([0.1, 0.0, 0.0, 0.0]),
                         forcing=ForcingTable.constant([5.0, 0.0, 0.0, 0.0]), R_stop=1.0)
    path = simulate_path(cfg)
    assert path.stopped
    assert path.kinds[-1] == STOP
    assert path.h_norms()[-1] >= 1.0
    assert np.all(path.h_norms()[:-1] < 1.0)
    assert path.end_time == path.stopped_at < 2.0
    assert np.array_equal(path.value_at(2.0), path.final_state)


def test_stop_on_a_jump_keeps_the_jump_flag(unit_basis):
    # symmetric atoms: zero compensator, so the state is 0 until the jump of size 0.5 * 4
    marks = AtomicMarks(points=[[4.0], [-4.0]], weights=[1.0, 1.0])
    noise = build_noise("additive", unit_basis, 4, marks=marks, params={"jump_amplitude": 0.5})
    jumps = JumpStream(np.array([0.35]), np.array([[4.0]]), horizon=1.0, seed=0, total_mass=2.0)
    cfg = GalerkinConfig(unit_basis, n=4, T=1.0, dt=0.1, u0=np.zeros(4), noise=noise, jumps=jumps,
                         R_stop=1.5, include_convection=False)
    path = simulate_path(cfg)
    assert path.stopped_at == pytest.approx(0.35)
    assert path.kinds[-1] == JUMP | STOP
    assert KIND_NAMES[int(path.kinds[-1])] == "jump+stop"
    assert path.jump_count == 1
    assert np.allclose(path.final_state, [2.0, 0.0, 0.0, 0.0])
    assert weak_form_residual(path) < 1e-10


def test_start_outside_ball_stops_at_zero(heat_config):
    path = simulate_path(replace(heat_config, R_stop=0.5))
    assert path.stopped_at == 0.0
    assert path.record_count == 1


def test_forcing_table_is_right_continuous(tmp_path):
    table_file = tmp_path / "forcing.csv"
    table_file.write_text("time,mode,coefficient\n0.5,1,2.0\n0.5,3,-1.0\n", encoding="utf-8")
    table = ForcingTable.from_csv(str(table_file), 4)
    assert np.array_equal(table.value(0.25, 4), np.zeros(4))
    assert np.array_equal(table.value(0.5, 4), [2.0, 0.0, -1.0, 0.0])
    assert np.array_equal(table.value(0.5, 2), [2.0, 0.0])
    assert table.l2_vprime_norm(1.0) == pytest.approx(np.sqrt(0.5 * 5.0))


def test_forcing_table_rejects_bad_rows(tmp_path):
    table_file = tmp_path / "forcing.csv"
    table_file.write_text("time,mode,coefficient\n0.0,9,1.0\n", encoding="utf-8")
    with pytest.raises(IngestionError):
        ForcingTable.from_csv(str(table_file), 4)
    with pytest.raises(IngestionError):
        ForcingTable.from_csv(str(tmp_path / "missing.csv"), 4)


def test_initial_field_presets(basis):
    assert np.array_equal(initial_field(basis, 4, "zero"), np.zeros(4))
    assert np.array_equal(initial_field(basis, 4, "mode", {"index": 2, "amplitude": 3.0}), [0, 3.0, 0, 0])
    random = initial_field(basis, 6, "random", {"seed": 1, "scale": 2.0})
    assert np.linalg.norm(random) == pytest.approx(2.0)
    assert np.array_equal(random, initial_field(basis, 6, "random", {"seed": 1, "scale": 2.0}))
    with pytest.raises(ConfigurationError):
        initial_field(basis, 4, "mode", {"index": 5})
    with pytest.raises(ConfigurationError):
        initial_field(basis, 4, "vortex")


def test_interpolant_weights():
    weights = interpolant_weights(np.array([0.0, 1.0]), 0.5)
    assert weights[0] == 0.5
    assert weights[1] == pytest.approx((1.0 - np.exp(-1.0)) / 2.0)


def test_dissipation_integral_of_heat_decay(heat_config):
    path = simulate_path(heat_config)
    # int_0^1 e^(-2t) dt for a unit mode with eigenvalue 1
    assert path.dissipation_integral() == pytest.approx((1.0 - np.exp(-2.0)) / 2.0, rel=1e-12)
    assert path.v_norm_sq_integral() == pytest.approx(1.0 - np.exp(-2.0), rel=1e-12)


def test_solver_requires_wiener_increment(additive_config):
    solver = GalerkinSolver(additive_config)
    with pytest.raises(ConfigurationError):
        solver.step(additive_config.u0, 0.0, 0.05)


def test_ensemble_seeds_and_statistics(additive_config):
    ensemble = simulate_ensemble(additive_config, M=4, base_seed=10)
    assert ensemble.seeds == [10, 11, 12, 13]
    stats = ensemble.stop_statistics()
    assert stats["paths"] == 4 and stats["stopped"] == 0 and stats["mean_tau"] is None
    assert all(p.config.seed == p.seed for p in ensemble.paths)


def test_ensemble_independent_of_worker_count(additive_config):
    serial = simulate_ensemble(additive_config, M=3, base_seed=2, workers=1)
    parallel = simulate_ensemble(additive_config, M=3, base_seed=2, workers=2)
    for a, b in zip(serial.paths, parallel.paths):
        assert np.array_equal(a.states, b.states)


def test_record_kinds(heat_config):
    path = simulate_path(heat_config)
    assert set(np.unique(path.kinds)) == {GRID}
