"""Divergence-free real Fourier basis on the periodic box [0, 2*pi)^d"""

import io
import csv
import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Tuple, Optional

import numpy as np

from ..utils.errors import ConfigurationError
from ..utils.hashing import sha256_text
from .weights import HollyWiciakWeights, holly_wiciak_weights

logger = logging.getLogger("sns_levy.spectral.basis")

BASIS_CSV_VERSION = 1
DEFAULT_SOBOLEV_ORDER = 3
DEFAULT_ETA0 = 0.5


@dataclass(frozen=True, order=True)
class WaveVector:
    """Integer wavenumber of a mean-zero mode"""

    components: Tuple[int, ...]

    def __post_init__(self):
        if not any(self.components):
            raise ConfigurationError("Wave vector must have a nonzero component (mean-zero fields only)")

    @property
    def dimension(self) -> int:
        return len(self.components)

    @property
    def norm_sq(self) -> int:
        return sum(c * c for c in self.components)

    def is_canonical(self) -> bool:
        """True for the representative of {k, -k} whose first nonzero component is positive"""
        for c in self.components:
            if c != 0:
                return c > 0
        return False


def integer_polarizations(k: Tuple[int, ...]) -> List[Tuple[int, ...]]:
    """Integer vectors orthogonal to ``k`` (and to each other in 3D)

    Orthogonality holds exactly in integer arithmetic; normalisation happens later.
    """
    if len(k) == 2:
        return [(-k[1], k[0])]

    kv = np.array(k, dtype=np.int64)
    axis = int(np.argmin(np.abs(kv)))
    helper = np.zeros(3, dtype=np.int64)
    helper[axis] = 1
    p1 = np.cross(kv, helper)
    p2 = np.cross(kv, p1)
    return [tuple(int(c) for c in p1), tuple(int(c) for c in p2)]


@dataclass(frozen=True)
class Mode:
    """One real basis element sqrt(2) * p * cos(k.x) or sqrt(2) * p * sin(k.x)"""

    wave: WaveVector
    polarization: int
    kind: str
    vector: Tuple[int, ...]

    @property
    def sort_key(self):
        return (self.wave.norm_sq, self.wave.components, self.polarization, 0 if self.kind == "cos" else 1)


@dataclass(frozen=True, eq=False)
class BasisTable:
    """Enumerated modes e_1..e_N with eigenvalues, V_m norms and U-weights

    Immutable after construction and safe to share across workers.
    """

    dimension: int
    n_max: int
    sobolev_order: float
    eta0: float
    modes: Tuple[Mode, ...]
    wavevectors: np.ndarray = field(repr=False)
    polarizations: np.ndarray = field(repr=False)
    is_cos: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    vm_norms: np.ndarray = field(repr=False)
    weights: HollyWiciakWeights = field(repr=False)
    partner: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.modes)

    @property
    def u_weights(self) -> np.ndarray:
        """Holly-Wiciak weights 1/r_i^2 (may overflow to inf for very high modes)"""
        return self.weights.u_weights

    @property
    def u_radii(self) -> np.ndarray:
        return self.weights.radii

    def mode_index(self, components: Tuple[int, ...], polarization: int = 0, kind: str = "cos") -> int:
        """Zero-based position of the mode with the given wave vector, polarization and kind"""
        for i, mode in enumerate(self.modes):
            if mode.wave.components == tuple(components) and mode.polarization == polarization and mode.kind == kind:
                return i
        raise ConfigurationError(f"No mode {components}/{polarization}/{kind} in basis")

    def csv_text(self) -> str:
        """Versioned CSV dump: mode index, k, polarization, eigenvalue, vm_norm, u_weight"""
        buffer = io.StringIO()
        buffer.write(f"# sns-levy basis v{BASIS_CSV_VERSION} d={self.dimension} n_max={self.n_max} "
                     f"m={self.sobolev_order} eta0={self.eta0}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        axes = [f"k{j + 1}" for j in range(self.dimension)]
        writer.writerow(["index", *axes, "polarization", "kind", "eigenvalue", "vm_norm",
                         "u_weight", "log_u_radius"])
        for i, mode in enumerate(self.modes):
            writer.writerow([i + 1, *mode.wave.components, mode.polarization, mode.kind,
                             repr(float(self.eigenvalues[i])), repr(float(self.vm_norms[i])),
                             repr(float(self.u_weights[i])), repr(float(self.weights.log_radii[i]))])
        return buffer.getvalue()

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(self.csv_text())

    def basis_hash(self) -> str:
        return sha256_text(self.csv_text())

    def gram_matrix(self, resolution: Optional[int] = None) -> np.ndarray:
        """H-Gram matrix computed by grid quadrature (identity up to rounding)"""
        from .grid import SpectralGrid

        grid = SpectralGrid(self, resolution or 2 * self.n_max + 2)
        samples = grid.mode_samples().reshape(self.size, -1)
        return samples @ samples.T / grid.points


def build_basis(d: int, n_max: int, m: float = DEFAULT_SOBOLEV_ORDER,
                eta0: float = DEFAULT_ETA0) -> BasisTable:
    """Enumerate the real divergence-free mean-zero modes with 0 < |k| <= n_max

    The cut is the Euclidean ball |k|^2 <= n_max^2, not the cube |k|_inf <= n_max:
    d = 2 gives 4 modes at n_max = 1 and 12 at n_max = 2 (the cube would give 24).

    Args:
        d: Dimension, 2 or 3
        n_max: Maximal wavenumber (Euclidean)
        m: Sobolev order of V_m, must exceed d/2 + 1
        eta0: Seed of the Holly-Wiciak recursion, in (0, 1)

    Returns:
        Immutable basis table sorted by (|k|^2, k, polarization, cos before sin)
    """
    if d not in (2, 3):
        raise ConfigurationError(f"Dimension must be 2 or 3, got {d}")
    if n_max < 1:
        raise ConfigurationError(f"n_max must be >= 1, got {n_max}")
    if m <= d / 2 + 1:
        raise ConfigurationError(f"Sobolev order m={m} must exceed d/2 + 1 = {d / 2 + 1}")

    modes: List[Mode] = []
    for components in itertools.product(range(-n_max, n_max + 1), repeat=d):
        if not any(components):
            continue
        wave = WaveVector(tuple(components))
        if not wave.is_canonical() or wave.norm_sq > n_max * n_max:
            continue
        for j, vector in enumerate(integer_polarizations(wave.components)):
            if sum(a * b for a, b in zip(vector, wave.components)) != 0:
                raise ConfigurationError(f"Polarization {vector} not orthogonal to {wave.components}")
            for kind in ("cos", "sin"):
                modes.append(Mode(wave=wave, polarization=j, kind=kind, vector=vector))
    modes.sort(key=lambda mode: mode.sort_key)

    wavevectors = np.array([mode.wave.components for mode in modes], dtype=np.int64)
    vectors = np.array([mode.vector for mode in modes], dtype=np.float64)
    polarizations = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    is_cos = np.array([mode.kind == "cos" for mode in modes])
    eigenvalues = np.sum(wavevectors.astype(np.float64) ** 2, axis=1)
    vm_norms = (1.0 + eigenvalues) ** (m / 2.0)

    lookup = {(mode.wave.components, mode.polarization, mode.kind): i for i, mode in enumerate(modes)}
    partner = np.array([
        lookup[(mode.wave.components, mode.polarization, "sin" if mode.kind == "cos" else "cos")]
        for mode in modes
    ], dtype=np.int64)

    weights = holly_wiciak_weights(vm_norms, eta0)

    table = BasisTable(
        dimension=d,
        n_max=n_max,
        sobolev_order=m,
        eta0=eta0,
        modes=tuple(modes),
        wavevectors=wavevectors,
        polarizations=polarizations,
        is_cos=is_cos,
        eigenvalues=eigenvalues,
        vm_norms=vm_norms,
        weights=weights,
        partner=partner,
    )
    for array in (wavevectors, polarizations, is_cos, eigenvalues, vm_norms, partner):
        array.setflags(write=False)

    logger.info(f"Basis built: d={d}, n_max={n_max}, m={m}, N={table.size} modes")
    return table
