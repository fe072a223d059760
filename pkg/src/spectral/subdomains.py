"""Nested sub-boxes O_1 in O_2 in ... in O_Rmax and local L^q seminorms"""

import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy import special

from ..utils.errors import ConfigurationError, ResolutionError
from .grid import evaluate_at_points, minimal_resolution

logger = logging.getLogger("sns_levy.spectral.subdomains")

BOX_LENGTH = 2.0 * np.pi


@dataclass(frozen=True)
class SubdomainFamily:
    """Axis-aligned boxes with per-box quadrature resolution

    Integrals over a box are normalised by the volume of the full periodic
    box, so the seminorm over O_Rmax with q=2 is the H norm.
    """

    dimension: int
    lows: np.ndarray = field(repr=False)
    highs: np.ndarray = field(repr=False)
    resolutions: Tuple[int, ...] = ()

    def __post_init__(self):
        lows = np.asarray(self.lows, dtype=np.float64)
        highs = np.asarray(self.highs, dtype=np.float64)
        if lows.shape != highs.shape or lows.ndim != 2 or lows.shape[1] != self.dimension:
            raise ConfigurationError("Box corners must have shape (R, d)")
        if len(self.resolutions) != len(lows):
            raise ConfigurationError("One quadrature resolution per box is required")
        if np.any(highs <= lows):
            raise ConfigurationError("Boxes must have positive side lengths")
        for r in range(1, len(lows)):
            contains = np.all(lows[r] <= lows[r - 1]) and np.all(highs[r] >= highs[r - 1])
            grows = np.any(lows[r] < lows[r - 1]) or np.any(highs[r] > highs[r - 1])
            if not (contains and grows):
                raise ConfigurationError(f"Box {r + 1} does not strictly contain box {r}")
        if not (np.allclose(lows[-1], 0.0) and np.allclose(highs[-1], BOX_LENGTH)):
            raise ConfigurationError("The largest box must be the full periodic box")
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)

    @classmethod
    def nested_centered(cls, dimension: int, count: int, resolution: int = 32) -> "SubdomainFamily":
        """Cubes centred at (pi, ..., pi) with side 2*pi*R/count, R = 1..count"""
        if count < 1:
            raise ConfigurationError("At least one subdomain is required")
        half = np.pi * np.arange(1, count + 1) / count
        lows = np.repeat((np.pi - half)[:, None], dimension, axis=1)
        highs = np.repeat((np.pi + half)[:, None], dimension, axis=1)
        return cls(dimension, lows, highs, tuple([resolution] * count))

    @property
    def count(self) -> int:
        return len(self.lows)

    def is_full(self, R: int) -> bool:
        return R == self.count

    def quadrature(self, R: int) -> Tuple[np.ndarray, np.ndarray]:
        """Points (P, d) and weights (P,) for box O_R, weights normalised by (2*pi)^d"""
        if not 1 <= R <= self.count:
            raise ConfigurationError(f"Subdomain index R={R} outside [1, {self.count}]")
        q = self.resolutions[R - 1]
        lo, hi = self.lows[R - 1], self.highs[R - 1]
        if self.is_full(R):
            # periodic trapezoid rule, exact for trigonometric polynomials of degree < q
            nodes = [BOX_LENGTH * np.arange(q) / q] * self.dimension
            axis_weights = [np.full(q, 1.0 / q)] * self.dimension
        else:
            x, w = special.roots_legendre(q)
            nodes = [lo[j] + (hi[j] - lo[j]) * (x + 1.0) / 2.0 for j in range(self.dimension)]
            axis_weights = [w * (hi[j] - lo[j]) / 2.0 / BOX_LENGTH for j in range(self.dimension)]
        mesh = np.meshgrid(*nodes, indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=1)
        weight_mesh = np.meshgrid(*axis_weights, indexing="ij")
        weights = np.prod(np.stack([m.ravel() for m in weight_mesh], axis=0), axis=0)
        return points, weights


def local_seminorm(path, family: SubdomainFamily, R: int, q: float) -> float:
    """p_{T,R}(u) = (int_0^T int_{O_R} |u(t,x)|^q dx dt)^(1/q) for a step-function path

    Args:
        path: Simulated path exposing ``basis``, ``states`` and ``durations()``
        family: Nested subdomains
        R: One-based box index
        q: Exponent in (1, inf)

    Returns:
        Seminorm value
    """
    if not 1.0 < q < np.inf:
        raise ConfigurationError(f"Exponent q={q} must lie in (1, inf)")
    basis = path.basis
    if family.dimension != basis.dimension:
        raise ConfigurationError("Subdomain family and basis have different dimensions")
    if family.resolutions[R - 1] < minimal_resolution(basis.n_max):
        raise ResolutionError(
            f"Quadrature on box {R} has {family.resolutions[R - 1]} points per axis, "
            f"need {minimal_resolution(basis.n_max)} for n_max={basis.n_max}"
        )
    points, weights = family.quadrature(R)
    durations = path.durations()
    total = 0.0
    for state, duration in zip(path.states, durations):
        if duration <= 0.0 or not np.any(state):
            continue
        velocity = evaluate_at_points(state, basis, points)
        magnitude = np.sqrt(np.sum(velocity * velocity, axis=1))
        total += duration * float(np.dot(weights, magnitude ** q))
    return float(total ** (1.0 / q))
