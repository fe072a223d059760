"""Cut-off of the nonlinearity by the U'-norm: B_n(u) = P_n B(theta_n(|u|_U') u, u)"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..spectral.basis import BasisTable
from ..spectral.field import SpectralField
from ..spectral.grid import SpectralGrid
from ..utils.errors import ConfigurationError
from .forms import convection_coeffs, dealiased_grid


def smoothstep(x: np.ndarray, order: int = 1) -> np.ndarray:
    """Polynomial step from 0 at x <= 0 to 1 at x >= 1 (order 1 cubic, order 2 quintic)"""
    x = np.clip(x, 0.0, 1.0)
    if order == 1:
        return x * x * (3.0 - 2.0 * x)
    if order == 2:
        return x * x * x * (x * (6.0 * x - 15.0) + 10.0)
    raise ConfigurationError(f"Unsupported smoothstep order {order}")


@dataclass(frozen=True)
class CutoffSpec:
    """theta_n(r) = 1 for r <= radius, 0 for r >= radius + 1, smooth and nonincreasing between

    Attributes:
        level: Galerkin level n (number of retained modes)
        smoothness: Smoothstep order of the transition
        radius: Cut-off radius, the level itself when omitted
    """

    level: int
    smoothness: int = 1
    radius: Optional[float] = None

    def __post_init__(self):
        if self.level < 1:
            raise ConfigurationError(f"Cut-off level must be positive, got {self.level}")
        if self.smoothness not in (1, 2):
            raise ConfigurationError(f"Smoothness must be 1 or 2, got {self.smoothness}")
        if self.radius is not None and self.radius < 0:
            raise ConfigurationError("Cut-off radius must be nonnegative")

    @property
    def threshold(self) -> float:
        return float(self.level if self.radius is None else self.radius)

    def theta(self, r: float) -> float:
        return float(1.0 - smoothstep(np.asarray(r - self.threshold, dtype=np.float64), self.smoothness))


def truncated_coeffs(basis: BasisTable, grid: SpectralGrid, a: np.ndarray, spec: CutoffSpec) -> np.ndarray:
    """Coefficients of B_n(a) for a state vector a of length n"""
    n = len(a)
    factor = spec.theta(basis.weights.norm_Uprime(a))
    if factor == 0.0:
        return np.zeros(n)
    coeffs = convection_coeffs(grid, a, a, n)
    return coeffs if factor == 1.0 else factor * coeffs


def truncated_Bn(u: SpectralField, spec: CutoffSpec, grid: Optional[SpectralGrid] = None) -> SpectralField:
    """P_n B(chi_n(u), u) with chi_n(u) = theta_n(|u|_U') u

    Raises:
        ConfigurationError: if u has components beyond e_n
    """
    n = spec.level
    basis = u.basis
    if n > basis.size:
        raise ConfigurationError(f"Level {n} exceeds basis size {basis.size}")
    if u.dual:
        raise ConfigurationError("B_n takes a primal field")
    if np.any(u.coeffs[n:]):
        raise ConfigurationError(f"Field has components beyond e_{n}")
    grid = grid or dealiased_grid(basis)
    return SpectralField(basis, truncated_coeffs(basis, grid, u.coeffs[:n], spec), dual=True)
