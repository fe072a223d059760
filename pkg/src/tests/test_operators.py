"""Stokes operator, trilinear form, truncated convection and fitted constants"""

import numpy as np
import pytest

from ..operators.audit import (LipschitzBands, cancellation_audit, estimate_B_extension_constant, fit_and_validate,
                               lipschitz_audit_B, random_ball_field, truncated_lipschitz_ratios)
from ..operators.forms import B_diag, B_op, convection_coeffs, dealiased_grid, stokes_apply, trilinear_b
from ..operators.truncation import CutoffSpec, smoothstep, truncated_Bn
from ..spectral.basis import build_basis
from ..spectral.field import SpectralField
from ..utils.config import config
from ..utils.errors import ConfigurationError, DualityError


@pytest.fixture
def fields(basis):
    rng = np.random.default_rng(7)
    return [SpectralField.random(basis, rng) for _ in range(3)]


def test_stokes_eigenvalues_and_dual_bound(basis, fields):
    u = fields[0]
    Au = stokes_apply(u)
    assert Au.dual
    assert np.allclose(Au.coeffs, basis.eigenvalues * u.coeffs)
    assert Au.norm_Vprime() <= u.seminorm_grad() * (1.0 + 1e-12)
    assert Au.dot(u) == pytest.approx(u.seminorm_grad_sq())


def test_stokes_rejects_dual_input(fields):
    with pytest.raises(DualityError):
        stokes_apply(fields[0].as_dual())


def test_trilinear_cancellation(fields):
    u, w, v = fields
    scale = u.norm_V() * w.norm_V() * v.norm_V()
    tolerance = config.cancellation_tolerance
    assert abs(trilinear_b(u, w, w)) <= tolerance * scale
    assert trilinear_b(u, w, v) == pytest.approx(-trilinear_b(u, v, w), abs=tolerance * scale)


def test_cancellation_audit_reads_configured_tolerance(basis):
    result = cancellation_audit(basis, pairs=10, seed=1)
    assert result["tolerance"] == config.cancellation_tolerance
    assert result["valid"]
    assert result["self"] <= result["tolerance"] and result["antisymmetry"] <= result["tolerance"]
    loose = cancellation_audit(basis, pairs=10, seed=1, tolerance=1.0)
    assert loose["tolerance"] == 1.0
    assert loose["self"] == result["self"]


@pytest.mark.slow
def test_cancellation_over_500_triples_at_n_max_8():
    result = cancellation_audit(build_basis(2, 8), pairs=500, seed=2)
    assert result["valid"], result
    assert result["tolerance"] == pytest.approx(1e-10)


def test_B_pairing_matches_trilinear_form(fields):
    u, w, v = fields
    assert B_op(u, w).dot(v) == pytest.approx(trilinear_b(u, w, v), abs=1e-10)
    assert abs(B_diag(u).dot(u)) < 1e-12 * u.norm_V() ** 3


def test_shear_mode_does_not_self_advect(unit_basis):
    # e_1 = sqrt(2) cos(y) in the x direction: u . grad u = 0
    u = SpectralField.mode(unit_basis, 0, amplitude=3.0)
    assert np.allclose(B_diag(u).coeffs, 0.0, atol=1e-12)


def test_convection_restricted_to_leading_modes(basis, fields):
    grid = dealiased_grid(basis)
    full = convection_coeffs(grid, fields[0].coeffs, fields[1].coeffs)
    assert np.allclose(convection_coeffs(grid, fields[0].coeffs, fields[1].coeffs, 5), full[:5])


def test_smoothstep_shape():
    x = np.linspace(-0.5, 1.5, 41)
    for order in (1, 2):
        values = smoothstep(x, order)
        assert values[0] == 0.0 and values[-1] == 1.0
        assert np.all(np.diff(values) >= 0)
    with pytest.raises(ConfigurationError):
        smoothstep(x, 3)


def test_cutoff_theta():
    spec = CutoffSpec(level=4, radius=2.0)
    assert spec.theta(1.5) == 1.0
    assert spec.theta(2.0) == 1.0
    assert spec.theta(3.0) == 0.0
    assert 0.0 < spec.theta(2.5) < 1.0
    assert CutoffSpec(level=4).threshold == 4.0
    with pytest.raises(ConfigurationError):
        CutoffSpec(level=4, smoothness=3)


def test_truncated_convection(unit_basis):
    coeffs = np.array([100.0, -50.0, 80.0, 20.0])
    u = SpectralField(unit_basis, coeffs)
    assert u.norm_Uprime() > 1.0
    assert np.allclose(truncated_Bn(u, CutoffSpec(level=4, radius=0.0)).coeffs, 0.0)
    untruncated = truncated_Bn(u, CutoffSpec(level=4, radius=1e6))
    assert np.allclose(untruncated.coeffs, B_diag(u).coeffs)
    assert abs(untruncated.dot(u)) < 1e-9 * u.norm_V() ** 3


def test_truncated_convection_rejects_high_components(basis):
    u = SpectralField.mode(basis, 8)
    with pytest.raises(ConfigurationError):
        truncated_Bn(u, CutoffSpec(level=4))


def test_fit_and_validate_on_bounded_ratios():
    result = fit_and_validate(lambda size, rng: rng.uniform(0.0, 1.0, size), 2000, seed=3)
    assert result["constant"] <= 1.0
    assert result["violations"] <= 20
    assert not result["refit"]


def test_random_ball_field_radius(basis):
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert random_ball_field(basis, rng, 2.0).norm_V() <= 2.0 + 1e-12
        assert not np.any(random_ball_field(basis, rng, 1.0, n=4, norm="H").coeffs[4:])


def test_extension_constant_is_positive(basis):
    assert estimate_B_extension_constant(basis, pairs=20) > 0.0


def test_lipschitz_audit(basis):
    rng = np.random.default_rng(4)
    bands = LipschitzBands(basis, samples=40)
    u = random_ball_field(basis, rng, 1.0)
    audit = lipschitz_audit_B(u, u, 1.0, bands)
    assert audit.satisfied is None
    assert LipschitzBands.band_for(0.3) == 1.0
    assert LipschitzBands.band_for(3.0) == 4.0
    with pytest.raises(ConfigurationError):
        lipschitz_audit_B(SpectralField.mode(basis, 0), u, 0.1, bands)


def test_truncated_lipschitz_ratios_are_finite(basis):
    ratios = truncated_lipschitz_ratios(basis, CutoffSpec(level=6), pairs=15, radius=2.0)
    assert ratios.shape == (15,)
    assert np.all(np.isfinite(ratios))


def test_benchmark_convection(benchmark, basis, fields):
    grid = dealiased_grid(basis)
    result = benchmark(convection_coeffs, grid, fields[0].coeffs, fields[0].coeffs)
    assert abs(float(np.dot(result, fields[0].coeffs))) < 1e-10


def test_benchmark_stokes(benchmark, fields):
    result = benchmark(stokes_apply, fields[1])
    assert result.dual
