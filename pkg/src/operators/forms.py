"""Stokes form, trilinear form b and the bilinear map B, computed pseudo-spectrally"""

import logging
from functools import lru_cache
from typing import Optional

import numpy as np

from ..spectral.basis import BasisTable
from ..spectral.field import SpectralField
from ..spectral.grid import SpectralGrid
from ..utils.config import config
from ..utils.errors import ConfigurationError, DualityError

logger = logging.getLogger("sns_levy.operators.forms")


@lru_cache(maxsize=16)
def dealiased_grid(basis: BasisTable) -> SpectralGrid:
    """Shared 2/3-rule grid of a basis"""
    return SpectralGrid(basis)


def _primal(*fields: SpectralField) -> BasisTable:
    basis = fields[0].basis
    for item in fields:
        if item.dual:
            raise DualityError("Operator argument must be a primal field")
        if item.basis is not basis:
            raise ConfigurationError("Operator arguments live on different bases")
    return basis


def stokes_apply(u: SpectralField) -> SpectralField:
    """Dual element A u with coefficients |k_i|^2 a_i"""
    basis = _primal(u)
    result = SpectralField(basis, basis.eigenvalues * u.coeffs, dual=True)
    if config.debug_checks:
        lhs, rhs = result.norm_Vprime(), u.seminorm_grad()
        if lhs > rhs * (1.0 + 1e-12) + 1e-300:
            logger.warning(f"Stokes dual-norm bound violated: |Au|_V' = {lhs:.6e} > ||u|| = {rhs:.6e}")
    return result


def convection_samples(grid: SpectralGrid, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Grid samples of (u . grad) w for coefficient vectors u, w"""
    velocity = grid.evaluate(u)
    gradient = grid.evaluate_gradient(w)
    return np.einsum("j...,lj...->l...", velocity, gradient)


def convection_coeffs(grid: SpectralGrid, u: np.ndarray, w: np.ndarray, n: Optional[int] = None) -> np.ndarray:
    """Dual coefficients b(u, w, e_i) for i < n"""
    return grid.pair_with_modes(convection_samples(grid, u, w), n, dealias=True)


def trilinear_b(u: SpectralField, w: SpectralField, v: SpectralField,
                grid: Optional[SpectralGrid] = None) -> float:
    """b(u, w, v) = mean over the box of (u . grad w) . v

    Args:
        u: Advecting field
        w: Advected field
        v: Test field
        grid: Quadrature grid, the dealiased grid of the basis by default

    Returns:
        Value of the form
    """
    basis = _primal(u, w, v)
    grid = grid or dealiased_grid(basis)
    return grid.mean_product(convection_samples(grid, u.coeffs, w.coeffs), grid.evaluate(v.coeffs))


def B_op(u: SpectralField, w: SpectralField, grid: Optional[SpectralGrid] = None) -> SpectralField:
    """B(u, w) as a dual element: <B(u, w), e_i> = b(u, w, e_i)"""
    basis = _primal(u, w)
    grid = grid or dealiased_grid(basis)
    return SpectralField(basis, convection_coeffs(grid, u.coeffs, w.coeffs), dual=True)


def B_diag(u: SpectralField, grid: Optional[SpectralGrid] = None) -> SpectralField:
    return B_op(u, u, grid)
