"""Taylor audit, moment estimates, level scans and the discrete energy balance"""

from dataclasses import replace

import numpy as np
import pytest

from ..analysis.tightness import tightness_report
from ..estimates.energy import energy_balance
from ..estimates.moments import MomentEstimate, MomentReport, bootstrap_mean, moment_estimates
from ..estimates.scan import MAX_LEVEL_RATIO, constant_scan, run_level_scan
from ..estimates.taylor import taylor_inequality_audit, taylor_ratio
from ..galerkin.config import ForcingTable, GalerkinConfig
from ..galerkin.ensemble import simulate_ensemble
from ..galerkin.solver import simulate_path
from ..noise.coefficients import build_noise
from ..noise.marks import BoxMarks
from ..spectral.basis import build_basis
from ..utils.errors import ConfigurationError, InsufficientData


def test_taylor_ratio_for_p_two():
    x = np.array([3.0, -1.0, 0.5])
    h = np.array([0.2, 0.7, -1.1])
    # |x + h|^2 - |x|^2 - 2<x, h> = |h|^2
    assert taylor_ratio(x, h, 2.0) == pytest.approx(0.5)
    assert taylor_ratio(x, np.zeros(3), 4.0) is None


def test_taylor_audit():
    quadratic = taylor_inequality_audit(2.0, samples=200, dimension=4, seed=3)
    assert quadratic["constant"] == pytest.approx(0.5, rel=1e-5)
    quartic = taylor_inequality_audit(4.0, samples=200, dimension=4, seed=3)
    assert np.isfinite(quartic["constant"]) and quartic["constant"] > 0
    assert quartic["samples"] == 200
    assert quartic["p"] == 4.0
    with pytest.raises(ConfigurationError):
        taylor_inequality_audit(1.5, samples=10)


def test_bootstrap_mean():
    estimate = bootstrap_mean(np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), resamples=199)
    assert estimate.mean == pytest.approx(3.5)
    assert estimate.ci_low <= estimate.mean <= estimate.ci_high
    flat = bootstrap_mean(np.full(5, 2.0))
    assert flat.ci_low == flat.mean == flat.ci_high == 2.0


def test_moments_of_the_heat_equation(heat_config):
    ensemble = simulate_ensemble(heat_config, 3, base_seed=0)
    report = moment_estimates(ensemble, [1.0, 2.0, 4.0])
    assert report.n == 4 and report.paths == 3
    assert report.statistic(2.0).mean == pytest.approx(1.0)
    assert report.statistic("v_integral").mean == pytest.approx(1.0 - np.exp(-2.0), rel=1e-12)
    assert report.lyapunov_ordered()
    assert len(report.rows()) == 4


def test_moment_orders_are_bounded(heat_config):
    paths = [simulate_path(heat_config)]
    with pytest.raises(ConfigurationError):
        moment_estimates(paths, [0.5])
    with pytest.raises(ConfigurationError):
        moment_estimates(paths, [6.0])
    assert moment_estimates(paths, [6.0], gamma=3.0).statistic(6.0).mean == pytest.approx(1.0)
    with pytest.raises(InsufficientData):
        moment_estimates([], [2.0])


def test_moments_of_a_noisy_ensemble_are_ordered(additive_config):
    ensemble = simulate_ensemble(additive_config, 6, base_seed=2)
    report = moment_estimates(ensemble, [2.0, 4.0, 5.0], resamples=199)
    assert report.lyapunov_ordered()
    for estimate in report.sup_moments.values():
        assert estimate.ci_low <= estimate.mean <= estimate.ci_high


def _report(n, mean, width=0.0):
    estimate = MomentEstimate(mean, mean - width, mean + width)
    return MomentReport(n=n, paths=10, seeds=list(range(10)), confidence=0.95, sup_moments={2.0: estimate},
                        v_integral=estimate)


def test_constant_scan_passes_bounded_moments():
    scan = constant_scan([_report(8, 1.1, 0.2), _report(2, 1.0, 0.2), _report(4, 0.9, 0.2)])
    assert scan.levels == [2, 4, 8]
    assert scan.verdict
    assert all(r <= MAX_LEVEL_RATIO for trend in scan.trends for r in trend.ratios)
    assert [t.statistic for t in scan.trends] == ["sup_h^2", "int_v_sq"]


def test_constant_scan_flags_growth():
    scan = constant_scan([_report(n, float(n) ** 2) for n in (2, 4, 8)])
    assert not scan.verdict
    trend = scan.trends[0]
    assert trend.slope == pytest.approx(2.0)
    assert not trend.trend_ok and not trend.ratio_ok
    assert trend.ratios == pytest.approx([4.0, 4.0])


def test_constant_scan_of_zero_moments():
    scan = constant_scan([_report(n, 0.0) for n in (2, 4, 8)])
    assert scan.verdict
    assert scan.trends[0].ratios == [1.0, 1.0]


def test_constant_scan_needs_three_levels():
    with pytest.raises(InsufficientData):
        constant_scan([_report(2, 1.0), _report(4, 1.0)])


def _linear_config(basis, n, forcing_scale):
    forcing = ForcingTable.constant(np.eye(basis.size)[0]).scaled(forcing_scale)
    return GalerkinConfig(basis=basis, n=n, T=1.0, dt=0.1, u0=np.zeros(n), forcing=forcing,
                          include_convection=False)


def test_level_scan_with_level_independent_forcing(basis):
    result = run_level_scan(lambda n: _linear_config(basis, n, 1.0), [2, 4, 8], M=2, p_list=[2.0])
    assert result["scan"].verdict
    assert len(result["reports"]) == 3


def test_level_scan_rejects_forcing_growing_with_level(basis):
    # the forced response grows linearly in n
    result = run_level_scan(lambda n: _linear_config(basis, n, float(n)), [2, 4, 8], M=2, p_list=[2.0])
    assert not result["scan"].verdict
    assert result["scan"].trends[0].slope == pytest.approx(2.0, abs=1e-9)


LEVELS = [4, 8, 16]
# mostly the |k| = 1 shell; the small |k|^2 = 2 part feeds the higher modes through convection
LEVEL_U0 = np.array([1.0, 0.5, -0.5, 0.3, 0.2, -0.2, 0.1, 0.1])


def _multiplicative_config(basis, n, dt=0.005, u0=LEVEL_U0, forcing=None, include_convection=True):
    marks = BoxMarks(low=[-1.0], high=[1.0], mass=1.0)
    noise = build_noise("linear-multiplicative", basis, n, marks=marks, params={"sigma_F": 0.3, "sigma_G": 0.1})
    return GalerkinConfig(basis=basis, n=n, T=1.0, dt=dt, u0=u0, noise=noise, forcing=forcing,
                          include_convection=include_convection)


@pytest.fixture(scope="module")
def level_ensembles():
    basis = build_basis(2, 3)
    return {n: simulate_ensemble(_multiplicative_config(basis, n), 200, base_seed=100) for n in LEVELS}


@pytest.mark.slow
def test_moments_stay_bounded_across_levels(level_ensembles):
    reports = [moment_estimates(level_ensembles[n], [2.0, 4.0]) for n in LEVELS]
    scan = constant_scan(reports)
    assert scan.levels == LEVELS
    assert scan.verdict, scan.to_dict()
    assert all(r <= MAX_LEVEL_RATIO for trend in scan.trends for r in trend.ratios)


@pytest.mark.slow
def test_level_scan_flags_multiplicative_run_with_level_scaled_forcing():
    basis = build_basis(2, 3)

    def make(n):
        # linear in (u, f) without convection: level n is n times level 1, path by path
        forcing = ForcingTable.constant(np.eye(basis.size)[0]).scaled(float(n))
        return _multiplicative_config(basis, n, dt=0.02, u0=np.zeros(n), forcing=forcing, include_convection=False)

    result = run_level_scan(make, LEVELS, M=200, p_list=[2.0, 4.0])
    assert not result["scan"].verdict
    assert result["scan"].trends[0].slope == pytest.approx(2.0, abs=1e-6)


@pytest.mark.slow
def test_tightness_conditions_on_level_ensembles(level_ensembles):
    for n in LEVELS:
        report = tightness_report(level_ensembles[n], q=2.0, deltas=[0.5, 0.25, 0.1, 0.05, 0.02, 0.005], eps=0.2)
        assert report.n == n and report.paths == 200
        assert report.condition_a and report.condition_b
        assert report.modulus_curve.is_monotone
        assert report.modulus_curve.smallest_delta_value < 0.1 * report.diameter
        assert report.verdict


def test_energy_balance_of_the_heat_equation(heat_config):
    balance = energy_balance(simulate_path(heat_config))
    # e^{-2h} - 1 + 2h on the first step, where |u|_H = 1
    assert balance.max_continuous == pytest.approx(np.exp(-0.2) - 0.8, rel=1e-9)
    assert balance.max_jump == 0.0
    finer = energy_balance(simulate_path(replace(heat_config, dt=0.05)))
    assert balance.max_continuous > 3.0 * finer.max_continuous
    summary = balance.to_dict()
    assert summary["intervals"] == 10 and summary["jumps"] == 0


def test_energy_balance_across_jumps(additive_config):
    path = simulate_path(additive_config)
    balance = energy_balance(path)
    assert len(balance.jumps) == path.jump_count
    assert balance.max_jump < 1e-12
    assert np.all(np.isfinite(balance.continuous))
