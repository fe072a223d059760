"""Pseudo-spectral transforms between basis coefficients and grid samples"""

import logging
from typing import Optional

import numpy as np
from scipy import fft as sp_fft

from ..utils.errors import ResolutionError
from .basis import BasisTable

logger = logging.getLogger("sns_levy.spectral.grid")

SQRT2 = float(np.sqrt(2.0))


def minimal_resolution(n_max: int) -> int:
    """Fewest points per axis that keep +k and -k apart for |k| <= n_max"""
    return 2 * n_max + 1


def dealiased_resolution(n_max: int) -> int:
    """Points per axis making every triad product of retained modes alias-free (2/3 rule)"""
    return sp_fft.next_fast_len(3 * n_max + 1)


class SpectralGrid:
    """Uniform periodic grid of M^d points carrying the transforms for one basis

    Coefficient vectors may be shorter than the basis; they are read as the
    leading modes e_1..e_n. Scratch arrays are allocated per call, so one
    instance can be shared between threads.
    """

    def __init__(self, basis: BasisTable, resolution: Optional[int] = None):
        self.basis = basis
        self.dimension = basis.dimension
        self.resolution = dealiased_resolution(basis.n_max) if resolution is None else int(resolution)
        if self.resolution < minimal_resolution(basis.n_max):
            raise ResolutionError(
                f"Grid of {self.resolution} points per axis cannot resolve n_max={basis.n_max} "
                f"(need at least {minimal_resolution(basis.n_max)})"
            )

        M, d = self.resolution, self.dimension
        self.shape = (M,) * d
        self.points = M ** d
        self.axes = tuple(range(1, d + 1))

        axis_wavenumbers = sp_fft.fftfreq(M, 1.0 / M)
        self.wavenumbers = np.array(np.meshgrid(*([axis_wavenumbers] * d), indexing="ij"))
        self.dealias_mask = np.all(np.abs(self.wavenumbers) < M / 3.0, axis=0)

        kv = basis.wavevectors
        self._plus_index = np.ravel_multi_index(tuple((kv % M).T), self.shape)
        self._minus_index = np.ravel_multi_index(tuple((-kv % M).T), self.shape)
        # +k coefficient of sqrt(2) p cos(k.x) is p / sqrt(2); of sqrt(2) p sin(k.x) it is -i p / sqrt(2)
        self._phase = np.where(basis.is_cos, 1.0 + 0.0j, -1.0j)

        logger.debug(f"Spectral grid ready: d={d}, M={M}, N={basis.size}")

    @property
    def coordinates(self) -> np.ndarray:
        """Grid points x_j = 2*pi*j/M, shape (d, M, ..., M)"""
        axis = 2.0 * np.pi * np.arange(self.resolution) / self.resolution
        return np.array(np.meshgrid(*([axis] * self.dimension), indexing="ij"))

    def spectrum(self, coeffs: np.ndarray) -> np.ndarray:
        """Complex Fourier coefficients u_hat of shape (d, M, ..., M)"""
        coeffs = np.asarray(coeffs, dtype=np.float64)
        n = len(coeffs)
        vectors = (coeffs / SQRT2)[:, None] * self.basis.polarizations[:n]
        plus = vectors * self._phase[:n, None]
        flat = np.zeros((self.dimension, self.points), dtype=np.complex128)
        for c in range(self.dimension):
            np.add.at(flat[c], self._plus_index[:n], plus[:, c])
            np.add.at(flat[c], self._minus_index[:n], np.conj(plus[:, c]))
        return flat.reshape((self.dimension,) + self.shape)

    def synthesize(self, spectrum: np.ndarray) -> np.ndarray:
        return sp_fft.ifftn(spectrum, axes=self.axes, norm="forward").real

    def analyze(self, samples: np.ndarray) -> np.ndarray:
        return sp_fft.fftn(samples, axes=self.axes, norm="forward")

    def evaluate(self, coeffs: np.ndarray) -> np.ndarray:
        """Velocity samples of shape (d, M, ..., M)"""
        return self.synthesize(self.spectrum(coeffs))

    def evaluate_gradient(self, coeffs: np.ndarray) -> np.ndarray:
        """Samples of d_j u_c arranged as (c, j, M, ..., M)"""
        spectrum = self.spectrum(coeffs)
        return np.stack([self.synthesize(1j * self.wavenumbers[j][None] * spectrum)
                         for j in range(self.dimension)], axis=1)

    def divergence(self, coeffs: np.ndarray) -> np.ndarray:
        """Pointwise divergence by spectral differentiation"""
        spectrum = self.spectrum(coeffs)
        div_hat = sum(1j * self.wavenumbers[j] * spectrum[j] for j in range(self.dimension))
        return sp_fft.ifftn(div_hat, norm="forward").real

    def pair_with_modes(self, samples: np.ndarray, n: Optional[int] = None, dealias: bool = False) -> np.ndarray:
        """Discrete pairings mean_x g(x) . e_i(x) for i < n

        On a primal band-limited field this inverts ``evaluate``; on a product
        field it gives the dual coefficients of its projection.
        """
        n = self.basis.size if n is None else n
        spectrum = self.analyze(samples)
        if dealias:
            spectrum = spectrum * self.dealias_mask[None]
        flat = spectrum.reshape(self.dimension, self.points)
        at_plus = flat[:, self._plus_index[:n]].T
        projected = np.sum(self.basis.polarizations[:n] * (at_plus * np.conj(self._phase[:n, None])).real, axis=1)
        return SQRT2 * projected

    def to_coeffs(self, samples: np.ndarray, n: Optional[int] = None) -> np.ndarray:
        return self.pair_with_modes(samples, n)

    def mean_product(self, left: np.ndarray, right: np.ndarray) -> float:
        """Grid quadrature of the H inner product of two sampled vector fields"""
        return float(np.sum(left * right) / self.points)

    def mode_samples(self) -> np.ndarray:
        """Every basis element sampled on the grid, shape (N, d, M, ..., M)"""
        x = self.coordinates.reshape(self.dimension, -1)
        phases = self.basis.wavevectors.astype(np.float64) @ x
        trig = np.where(self.basis.is_cos[:, None], np.cos(phases), np.sin(phases))
        samples = SQRT2 * self.basis.polarizations[:, :, None] * trig[:, None, :]
        return samples.reshape((self.basis.size, self.dimension) + self.shape)


def evaluate_on_grid(coeffs: np.ndarray, basis: BasisTable, resolution: int) -> np.ndarray:
    """Samples of sum a_i e_i on a resolution^d grid

    Raises:
        ResolutionError: if resolution < 2 * n_max + 1
    """
    return SpectralGrid(basis, resolution).evaluate(coeffs)


def evaluate_at_points(coeffs: np.ndarray, basis: BasisTable, points: np.ndarray) -> np.ndarray:
    """Direct trigonometric sums at arbitrary points of shape (P, d); returns (P, d)"""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    n = len(coeffs)
    phases = points @ basis.wavevectors[:n].astype(np.float64).T
    trig = np.where(basis.is_cos[:n][None, :], np.cos(phases), np.sin(phases))
    return SQRT2 * (trig * coeffs[None, :]) @ basis.polarizations[:n]
