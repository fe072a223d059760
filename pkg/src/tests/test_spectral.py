"""Basis enumeration, field norms, grid transforms, U-weights and local seminorms"""

import numpy as np
import pytest

from ..cli.models import mode_count
from ..galerkin.solver import simulate_path
from ..spectral.basis import build_basis
from ..spectral.field import SpectralField, project_Pn
from ..spectral.grid import SpectralGrid, evaluate_at_points, evaluate_on_grid, minimal_resolution
from ..spectral.subdomains import SubdomainFamily, local_seminorm
from ..spectral.weights import embedding_norm_search, holly_wiciak_weights
from ..utils.errors import ConfigurationError, DualityError, ResolutionError


@pytest.mark.parametrize("d, n_max, expected", [(2, 1, 4), (2, 2, 12), (2, 3, 28), (2, 4, 48)])
def test_mode_count_euclidean_cutoff(d, n_max, expected):
    assert build_basis(d, n_max).size == expected
    assert mode_count(d, n_max) == expected


def test_three_dimensional_modes_have_two_polarizations():
    basis = build_basis(3, 1)
    assert basis.size == mode_count(3, 1) == 12
    # each polarization is orthogonal to its wave vector
    assert np.allclose(np.sum(basis.polarizations * basis.wavevectors, axis=1), 0.0)


def test_unit_basis_order_and_eigenvalues(unit_basis):
    assert np.allclose(unit_basis.eigenvalues, 1.0)
    assert unit_basis.mode_index((0, 1), kind="cos") == 0
    assert unit_basis.mode_index((0, 1), kind="sin") == 1
    assert unit_basis.mode_index((1, 0), kind="cos") == 2
    assert unit_basis.mode_index((1, 0), kind="sin") == 3


def test_eigenvalues_are_sorted(basis):
    assert np.all(np.diff(basis.eigenvalues) >= 0)
    assert basis.eigenvalues[-1] == 4.0


def test_basis_is_orthonormal(basis):
    assert np.max(np.abs(basis.gram_matrix() - np.eye(basis.size))) < 1e-12


def test_build_basis_rejects_bad_arguments():
    with pytest.raises(ConfigurationError):
        build_basis(4, 2)
    with pytest.raises(ConfigurationError):
        build_basis(2, 0)
    with pytest.raises(ConfigurationError):
        build_basis(3, 2, m=2.5)


def test_basis_hash_is_stable_and_sensitive():
    assert build_basis(2, 2).basis_hash() == build_basis(2, 2).basis_hash()
    assert build_basis(2, 2).basis_hash() != build_basis(2, 2, eta0=0.25).basis_hash()


def test_norms_of_a_single_mode(basis):
    index = basis.size - 1
    u = SpectralField.mode(basis, index, amplitude=2.0)
    lam = basis.eigenvalues[index]
    assert u.norm_H() == pytest.approx(2.0)
    assert u.seminorm_grad_sq() == pytest.approx(4.0 * lam)
    assert u.norm_V_sq() == pytest.approx(4.0 * (1.0 + lam))
    assert u.as_dual().norm_Vprime() == pytest.approx(2.0 / np.sqrt(1.0 + lam))


def test_dual_norms_reject_primal_fields(basis):
    u = SpectralField.mode(basis, 0)
    with pytest.raises(DualityError):
        u.norm_Vprime()
    with pytest.raises(DualityError):
        u.as_dual().norm_H()
    with pytest.raises(DualityError):
        u.as_dual().dot(u.as_dual())


def test_uprime_norm_is_below_h_norm(basis):
    rng = np.random.default_rng(3)
    for _ in range(10):
        u = SpectralField.random(basis, rng)
        assert u.norm_Uprime() < u.norm_H()
        assert u.norm_U() > u.norm_H()


def test_projection_keeps_leading_modes(basis):
    u = SpectralField.random(basis, np.random.default_rng(0))
    projected = project_Pn(u, 5)
    assert np.array_equal(projected.coeffs[:5], u.coeffs[:5])
    assert not np.any(projected.coeffs[5:])


def test_grid_round_trip_and_divergence(basis):
    grid = SpectralGrid(basis)
    coeffs = np.random.default_rng(1).standard_normal(basis.size)
    samples = grid.evaluate(coeffs)
    assert np.allclose(grid.to_coeffs(samples), coeffs, atol=1e-12)
    assert np.max(np.abs(grid.divergence(coeffs))) < 1e-12
    assert grid.mean_product(samples, samples) == pytest.approx(float(np.dot(coeffs, coeffs)))


def test_grid_below_minimal_resolution(basis):
    with pytest.raises(ResolutionError):
        SpectralGrid(basis, resolution=minimal_resolution(basis.n_max) - 1)


def test_point_evaluation_matches_grid(unit_basis):
    grid = SpectralGrid(unit_basis)
    coeffs = np.array([0.3, -1.0, 0.5, 2.0])
    points = grid.coordinates.reshape(2, -1).T
    on_grid = grid.evaluate(coeffs).reshape(2, -1).T
    assert np.allclose(evaluate_at_points(coeffs, unit_basis, points), on_grid, atol=1e-12)


def test_evaluate_on_minimal_grid(unit_basis):
    coeffs = np.array([1.0, 0.0, -0.5, 0.25])
    resolution = minimal_resolution(unit_basis.n_max)
    samples = evaluate_on_grid(coeffs, unit_basis, resolution)
    assert samples.shape == (2, resolution, resolution)
    points = SpectralGrid(unit_basis, resolution).coordinates.reshape(2, -1).T
    assert np.allclose(samples.reshape(2, -1).T, evaluate_at_points(coeffs, unit_basis, points), atol=1e-12)
    with pytest.raises(ResolutionError):
        evaluate_on_grid(coeffs, unit_basis, resolution - 1)


def test_weight_recursion():
    weights = holly_wiciak_weights(np.ones(6), eta0=0.5)
    assert np.allclose(1.0 - weights.eta, 0.5 * 0.5 ** np.arange(1, 7))
    assert np.allclose(weights.radii, (1.0 - weights.eta) / 2.0)
    with pytest.raises(ConfigurationError):
        holly_wiciak_weights(np.ones(3), eta0=1.0)


def test_embedding_bound_holds(basis):
    ratio = embedding_norm_search(basis.weights, basis.vm_norms, samples=500)
    assert 0.0 < ratio <= 1.0 - basis.eta0


@pytest.mark.slow
def test_embedding_bound_over_10000_directions():
    basis = build_basis(2, 4, eta0=0.5)
    ratio = embedding_norm_search(basis.weights, basis.vm_norms, samples=10_000, seed=1)
    assert 0.0 < ratio <= 0.5


def test_full_box_seminorm_is_l2_h_norm(heat_config):
    path = simulate_path(heat_config)
    family = SubdomainFamily.nested_centered(2, count=3, resolution=8)
    assert local_seminorm(path, family, 3, 2.0) == pytest.approx(path.l2_h_norm(), rel=1e-10)
    # nested boxes see at most the full integral
    assert local_seminorm(path, family, 1, 2.0) <= local_seminorm(path, family, 3, 2.0)


def test_seminorm_rejects_bad_exponent_and_resolution(heat_config):
    path = simulate_path(heat_config)
    with pytest.raises(ConfigurationError):
        local_seminorm(path, SubdomainFamily.nested_centered(2, 2), 1, 1.0)
    with pytest.raises(ResolutionError):
        local_seminorm(path, SubdomainFamily.nested_centered(2, 2, resolution=2), 1, 2.0)
