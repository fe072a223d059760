"""Noise coefficients F (jumps) and G (Wiener) as named presets

Every preset is time-homogeneous and acts by bounded linear maps or
constants on the coefficient vector, so F and G extend continuously to
L^2(0, T; H_loc); this is why the continuity hypotheses hold for them.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Type

import numpy as np

from ..spectral.basis import BasisTable
from ..utils.errors import ConfigurationError
from .marks import MarkSpaceSpec

logger = logging.getLogger("sns_levy.noise.coefficients")

DEFAULT_GAMMA = 1.0


def moment_orders(gamma: float) -> List[float]:
    return [2.0, 4.0, 4.0 + gamma, 8.0 + 2.0 * gamma]


def coercivity_floor(gamma: float) -> float:
    """Lower bound 2 - 2/(3 + gamma) that the coercivity constant a must exceed"""
    return 2.0 - 2.0 / (3.0 + gamma)


@dataclass
class DeclaredConstants:
    """Constants claimed for F and G

    Attributes:
        L: Lipschitz constant of F in the nu-mean square
        C_p: Growth constants of F keyed by moment order p
        gamma: Integrability excess, > 0
        a: Coercivity constant
        lam: lambda of the coercivity inequality
        kappa: kappa of the coercivity inequality
        L_G: Lipschitz constant of G into Hilbert-Schmidt operators
        C_G: Growth constant of G into HS(V')
    """

    L: float = 0.0
    C_p: Dict[float, float] = field(default_factory=dict)
    gamma: float = DEFAULT_GAMMA
    a: float = 2.0
    lam: float = 0.0
    kappa: float = 0.0
    L_G: float = 0.0
    C_G: float = 0.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ConfigurationError(f"gamma must be positive, got {self.gamma}")
        self.C_p = {float(p): float(c) for p, c in self.C_p.items()}

    def growth_constant(self, p: float) -> float:
        for key, value in self.C_p.items():
            if abs(key - p) < 1e-12:
                return value
        raise ConfigurationError(f"No declared growth constant C_p for p={p}")

    def to_dict(self) -> Dict[str, Any]:
        return {"L": self.L, "C_p": {str(p): c for p, c in self.C_p.items()}, "gamma": self.gamma,
                "a": self.a, "lambda": self.lam, "kappa": self.kappa, "L_G": self.L_G, "C_G": self.C_G}


class NoiseCoefficients:
    """Base class of F(t, u; y) and G(t, u) restricted to span(e_1..e_n)

    Subclasses implement ``jump`` and ``diffusion`` on coefficient vectors of
    length n and fill in their default constants.
    """

    preset = "abstract"

    def __init__(self, basis: BasisTable, n: int, marks: Optional[MarkSpaceSpec] = None,
                 params: Optional[Dict[str, Any]] = None, constants: Optional[Dict[str, Any]] = None,
                 quadrature_order: int = 8):
        if not 1 <= n <= basis.size:
            raise ConfigurationError(f"Level n={n} outside [1, {basis.size}]")
        self.basis = basis
        self.n = n
        self.marks = marks
        self.params = dict(params or {})
        self.quadrature_order = quadrature_order
        self.gamma = float(self.params.get("gamma", (constants or {}).get("gamma", DEFAULT_GAMMA)))
        defaults = self.default_constants()
        overrides = dict(constants or {})
        if "lambda" in overrides:
            overrides["lam"] = overrides.pop("lambda")
        if "C_p" in overrides:
            defaults.C_p.update({float(p): float(c) for p, c in overrides.pop("C_p").items()})
        for key, value in overrides.items():
            setattr(defaults, key, value)
        self.constants = defaults
        self._nodes, self._weights = marks.quadrature(quadrature_order) if marks is not None else (None, None)

    # structure

    @property
    def wiener_modes(self) -> int:
        return 0

    @property
    def has_jumps(self) -> bool:
        return self.marks is not None and self.marks.total_mass > 0 and self.jump_scale() != 0.0

    @property
    def has_wiener(self) -> bool:
        return self.wiener_modes > 0

    def jump_scale(self) -> float:
        return 0.0

    def default_constants(self) -> DeclaredConstants:
        return DeclaredConstants(gamma=self.gamma)

    def mark_moment(self, p: float) -> float:
        """int |y_1|^p nu(dy) by the mark quadrature"""
        if self.marks is None:
            return 0.0
        nodes, weights = self.marks.quadrature(self.quadrature_order)
        return float(np.dot(weights, np.abs(nodes[:, 0]) ** p))

    @property
    def mark_nodes(self) -> np.ndarray:
        return self._nodes

    @property
    def mark_weights(self) -> np.ndarray:
        return self._weights

    # maps

    def jump(self, t: float, a: np.ndarray, y: np.ndarray) -> np.ndarray:
        """P_n F(t, u; y) for the state a"""
        return np.zeros(len(a))

    def diffusion(self, t: float, a: np.ndarray) -> np.ndarray:
        """P_n G(t, u) as an (n, K) matrix of columns"""
        return np.zeros((len(a), self.wiener_modes))

    def compensator(self, t: float, a: np.ndarray) -> np.ndarray:
        """int_Y P_n F(t, u; y) nu(dy) by the mark quadrature"""
        if self.marks is None:
            return np.zeros(len(a))
        total = np.zeros(len(a))
        for y, w in zip(self._nodes, self._weights):
            total = total + w * self.jump(t, a, y)
        return total

    def hs_norm_sq(self, t: float, a: np.ndarray) -> float:
        """||P_n G(t, u)||_HS^2 with values in H"""
        g = self.diffusion(t, a)
        return float(np.sum(g * g))

    def hs_norm_Vprime_sq(self, t: float, a: np.ndarray) -> float:
        g = self.diffusion(t, a)
        return float(np.sum(g * g / (1.0 + self.basis.eigenvalues[:len(a)])[:, None]))

    def describe(self) -> Dict[str, Any]:
        return {
            "preset": self.preset,
            "n": self.n,
            "params": self.params,
            "marks": self.marks.to_dict() if self.marks is not None else None,
            "wiener_modes": self.wiener_modes,
            "constants": self.constants.to_dict(),
        }


class NoNoise(NoiseCoefficients):
    """F = 0 and G = 0: deterministic Navier-Stokes"""

    preset = "none"


class AdditiveNoise(NoiseCoefficients):
    """F(u; y) = amplitude * y_1 * e_1 and G with columns sigma * e_k, k <= K

    Neither map depends on u, so continuity in u is trivial.
    """

    preset = "additive"

    @property
    def wiener_modes(self) -> int:
        if float(self.params.get("sigma", 0.0)) == 0.0:
            return 0
        modes = int(self.params.get("wiener_modes", 1))
        if not 1 <= modes <= self.n:
            raise ConfigurationError(f"Additive noise needs 1 <= wiener_modes <= n, got {modes}")
        return modes

    def jump_scale(self) -> float:
        return float(self.params.get("jump_amplitude", 0.0))

    def default_constants(self) -> DeclaredConstants:
        amp = abs(self.jump_scale())
        sigma = float(self.params.get("sigma", 0.0))
        modes = self.wiener_modes
        return DeclaredConstants(
            L=0.0,
            C_p={p: amp ** p * self.mark_moment(p) for p in moment_orders(self.gamma)},
            gamma=self.gamma, a=2.0, lam=0.0, kappa=modes * sigma ** 2,
            L_G=0.0, C_G=modes * sigma ** 2,
        )

    def jump(self, t: float, a: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = np.zeros(len(a))
        out[0] = self.jump_scale() * float(np.atleast_1d(y)[0])
        return out

    def diffusion(self, t: float, a: np.ndarray) -> np.ndarray:
        modes = self.wiener_modes
        g = np.zeros((len(a), modes))
        g[np.arange(modes), np.arange(modes)] = float(self.params.get("sigma", 0.0))
        return g


class LinearMultiplicativeNoise(NoiseCoefficients):
    """F(u; y) = sigma_F * y_1 * u and G(u) = sigma_G * u (one Wiener mode)

    Both are bounded linear maps of u, hence continuous in any topology in
    which u converges.
    """

    preset = "linear-multiplicative"

    @property
    def wiener_modes(self) -> int:
        return 1 if float(self.params.get("sigma_G", 0.0)) != 0.0 else 0

    def jump_scale(self) -> float:
        return float(self.params.get("sigma_F", 0.0))

    def default_constants(self) -> DeclaredConstants:
        sigma_F = abs(self.jump_scale())
        sigma_G = float(self.params.get("sigma_G", 0.0))
        return DeclaredConstants(
            L=sigma_F ** 2 * self.mark_moment(2.0),
            C_p={p: sigma_F ** p * self.mark_moment(p) for p in moment_orders(self.gamma)},
            gamma=self.gamma, a=2.0, lam=sigma_G ** 2, kappa=0.0,
            L_G=sigma_G ** 2, C_G=sigma_G ** 2,
        )

    def jump(self, t: float, a: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (self.jump_scale() * float(np.atleast_1d(y)[0])) * a

    def diffusion(self, t: float, a: np.ndarray) -> np.ndarray:
        if not self.wiener_modes:
            return np.zeros((len(a), 0))
        return (float(self.params["sigma_G"]) * a)[:, None]


class GradientMultiplicativeNoise(LinearMultiplicativeNoise):
    """G(u) = beta * d u / d x_1 (one Wiener mode), optional linear jump part

    On the basis, d/dx_1 maps the cos mode of (k, j) to -k_1 times its sin
    partner and the sin mode to k_1 times its cos partner. It is bounded
    from V to H, so G is continuous from L^2(0, T; V) as required.
    """

    preset = "gradient-multiplicative"

    @property
    def wiener_modes(self) -> int:
        return 1 if float(self.params.get("beta", 0.0)) != 0.0 else 0

    def default_constants(self) -> DeclaredConstants:
        sigma_F = abs(self.jump_scale())
        beta = float(self.params.get("beta", 0.0))
        return DeclaredConstants(
            L=sigma_F ** 2 * self.mark_moment(2.0),
            C_p={p: sigma_F ** p * self.mark_moment(p) for p in moment_orders(self.gamma)},
            gamma=self.gamma, a=2.0 - beta ** 2, lam=0.0, kappa=0.0,
            L_G=beta ** 2, C_G=beta ** 2,
        )

    def derivative_x1(self, a: np.ndarray) -> np.ndarray:
        n = len(a)
        k1 = self.basis.wavevectors[:n, 0].astype(np.float64)
        partner = self.basis.partner[:n]
        signs = np.where(self.basis.is_cos[:n], -1.0, 1.0)
        out = np.zeros(n)
        inside = partner < n
        np.add.at(out, partner[inside], (signs * k1 * a)[inside])
        return out

    def diffusion(self, t: float, a: np.ndarray) -> np.ndarray:
        if not self.wiener_modes:
            return np.zeros((len(a), 0))
        return (float(self.params["beta"]) * self.derivative_x1(a))[:, None]


PRESETS: Dict[str, Type[NoiseCoefficients]] = {
    NoNoise.preset: NoNoise,
    AdditiveNoise.preset: AdditiveNoise,
    LinearMultiplicativeNoise.preset: LinearMultiplicativeNoise,
    GradientMultiplicativeNoise.preset: GradientMultiplicativeNoise,
}


def build_noise(preset: str, basis: BasisTable, n: int, marks: Optional[MarkSpaceSpec] = None,
                params: Optional[Dict[str, Any]] = None,
                constants: Optional[Dict[str, Any]] = None) -> NoiseCoefficients:
    """Instantiate a named noise preset on span(e_1..e_n)"""
    if preset not in PRESETS:
        raise ConfigurationError(f"Unknown noise preset '{preset}', expected one of {sorted(PRESETS)}")
    noise = PRESETS[preset](basis, n, marks=marks, params=params, constants=constants)
    logger.debug(f"Noise preset {preset} on n={n}: jumps={noise.has_jumps}, wiener modes={noise.wiener_modes}")
    return noise
