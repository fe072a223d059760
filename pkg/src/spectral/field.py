"""Velocity fields as coefficient vectors on a BasisTable"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..utils.errors import ConfigurationError, DualityError
from .basis import BasisTable


@dataclass(frozen=True)
class SpectralField:
    """Coefficients a_1..a_N of a primal (H, V) or dual (V', V_m', U') element

    Attributes:
        basis: Shared basis table
        coeffs: Coefficient vector of length N
        dual: True when the coefficients are duality pairings against e_i
    """

    basis: BasisTable = field(repr=False)
    coeffs: np.ndarray
    dual: bool = False

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.float64)
        if coeffs.ndim != 1 or len(coeffs) > self.basis.size:
            raise ConfigurationError(f"Coefficient vector of shape {coeffs.shape} does not fit basis of size {self.basis.size}")
        if len(coeffs) < self.basis.size:
            coeffs = np.concatenate([coeffs, np.zeros(self.basis.size - len(coeffs))])
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zeros(cls, basis: BasisTable, dual: bool = False) -> "SpectralField":
        return cls(basis, np.zeros(basis.size), dual)

    @classmethod
    def mode(cls, basis: BasisTable, index: int, amplitude: float = 1.0) -> "SpectralField":
        """amplitude * e_index with a zero-based index"""
        coeffs = np.zeros(basis.size)
        coeffs[index] = amplitude
        return cls(basis, coeffs)

    @classmethod
    def random(cls, basis: BasisTable, rng: np.random.Generator, n: Optional[int] = None,
               scale: float = 1.0) -> "SpectralField":
        """Gaussian coefficients on the first n modes"""
        n = basis.size if n is None else n
        coeffs = np.zeros(basis.size)
        coeffs[:n] = scale * rng.standard_normal(n)
        return cls(basis, coeffs)

    def _require_primal(self):
        if self.dual:
            raise DualityError("Primal norm requested on a dual element")

    def _require_dual(self):
        if not self.dual:
            raise DualityError("Dual norm requested on a primal element")

    def _check_basis(self, other: "SpectralField"):
        if other.basis is not self.basis:
            raise ConfigurationError("Fields live on different bases")

    # primal norms

    def norm_H_sq(self) -> float:
        self._require_primal()
        return float(np.dot(self.coeffs, self.coeffs))

    def seminorm_grad_sq(self) -> float:
        self._require_primal()
        return float(np.dot(self.basis.eigenvalues * self.coeffs, self.coeffs))

    def norm_V_sq(self) -> float:
        return self.norm_H_sq() + self.seminorm_grad_sq()

    def norm_H(self) -> float:
        return float(np.sqrt(self.norm_H_sq()))

    def seminorm_grad(self) -> float:
        return float(np.sqrt(self.seminorm_grad_sq()))

    def norm_V(self) -> float:
        return float(np.sqrt(self.norm_V_sq()))

    def norm_Vm(self, m: Optional[float] = None) -> float:
        self._require_primal()
        m = self.basis.sobolev_order if m is None else m
        weights = (1.0 + self.basis.eigenvalues) ** (m / 2.0)
        return float(np.linalg.norm(weights * self.coeffs))

    def norm_U(self) -> float:
        self._require_primal()
        return self.basis.weights.norm_U(self.coeffs)

    # dual norms

    def norm_Vprime(self) -> float:
        self._require_dual()
        return float(np.sqrt(np.sum(self.coeffs ** 2 / (1.0 + self.basis.eigenvalues))))

    def norm_Vm_dual(self, m: Optional[float] = None) -> float:
        self._require_dual()
        m = self.basis.sobolev_order if m is None else m
        return float(np.sqrt(np.sum(self.coeffs ** 2 / (1.0 + self.basis.eigenvalues) ** m)))

    def norm_Uprime(self) -> float:
        """|x|_{U'}; H is embedded in U' so primal fields are accepted too"""
        return self.basis.weights.norm_Uprime(self.coeffs)

    # algebra

    def dot(self, other: "SpectralField") -> float:
        """H inner product, or the duality pairing when exactly one side is dual"""
        self._check_basis(other)
        if self.dual and other.dual:
            raise DualityError("Cannot pair two dual elements")
        return float(np.dot(self.coeffs, other.coeffs))

    def as_dual(self) -> "SpectralField":
        return SpectralField(self.basis, self.coeffs, True)

    def as_primal(self) -> "SpectralField":
        return SpectralField(self.basis, self.coeffs, False)

    def leading(self, n: int) -> np.ndarray:
        return np.array(self.coeffs[:n])

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_basis(other)
        if self.dual != other.dual:
            raise DualityError("Cannot add primal and dual elements")
        return SpectralField(self.basis, self.coeffs + other.coeffs, self.dual)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return self + other * -1.0

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.basis, self.coeffs * float(scalar), self.dual)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return self * -1.0


def project_Pn(x: SpectralField, n: int) -> SpectralField:
    """Zero the coefficients beyond index n (one-based count of kept modes)"""
    if not 1 <= n <= x.basis.size:
        raise ConfigurationError(f"Projection level n={n} outside [1, {x.basis.size}]")
    coeffs = np.array(x.coeffs)
    coeffs[n:] = 0.0
    return SpectralField(x.basis, coeffs, x.dual)
