"""Holly-Wiciak weights of the compactly embedded space U"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ..utils.errors import ConfigurationError

logger = logging.getLogger("sns_levy.spectral.weights")

LOG2 = float(np.log(2.0))


@dataclass(frozen=True)
class HollyWiciakWeights:
    """Per-mode radii r_n with U-norm |x|_U^2 = sum (x_n / r_n)^2

    Radii shrink like 2^-n, so they are kept in log form and norms are
    accumulated with logsumexp.
    """

    eta0: float
    eta: np.ndarray = field(repr=False)
    log_radii: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.log_radii)

    @property
    def radii(self) -> np.ndarray:
        return np.exp(self.log_radii)

    @property
    def u_weights(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(-2.0 * self.log_radii)

    def _log_norm(self, coeffs: np.ndarray, sign: float) -> float:
        coeffs = np.asarray(coeffs, dtype=np.float64)
        squares = coeffs * coeffs
        if not np.any(squares):
            return -np.inf
        log_r = self.log_radii[:len(coeffs)]
        return 0.5 * float(logsumexp(sign * 2.0 * log_r, b=squares))

    def norm_U(self, coeffs: np.ndarray) -> float:
        """|x|_U for H-coefficients ``coeffs`` (inf when the sum overflows)"""
        with np.errstate(over="ignore"):
            return float(np.exp(self._log_norm(coeffs, -1.0)))

    def norm_Uprime(self, coeffs: np.ndarray) -> float:
        """|x|_{U'} = sqrt(sum r_n^2 x_n^2)"""
        return float(np.exp(self._log_norm(coeffs, 1.0)))

    def embedding_ratio(self, coeffs: np.ndarray, phi_norms: np.ndarray) -> float:
        """|x|_Phi / |x|_U for a nonzero x"""
        coeffs = np.asarray(coeffs, dtype=np.float64)
        phi = np.asarray(phi_norms, dtype=np.float64)[:len(coeffs)]
        log_phi = 0.5 * float(logsumexp(2.0 * np.log(phi), b=coeffs * coeffs))
        return float(np.exp(log_phi - self._log_norm(coeffs, -1.0)))


def holly_wiciak_weights(phi_norms: np.ndarray, eta0: float, embedding_norm: float = 1.0) -> HollyWiciakWeights:
    """Radii r_n = (1 - eta_n) / (2 |h_n|_Phi) with eta_n = (eta_{n-1} + 1) / 2

    Args:
        phi_norms: Per-mode norms |h_n|_Phi of the H-orthonormal basis
        eta0: Seed of the recursion, strictly between 0 and 1
        embedding_norm: Norm of the embedding Phi into H; every phi norm must be at least its inverse

    Returns:
        Weights object with eta_1..eta_N and log radii
    """
    if not 0.0 < eta0 < 1.0:
        raise ConfigurationError(f"eta0 must lie in (0, 1), got {eta0}")
    phi = np.asarray(phi_norms, dtype=np.float64)
    if phi.ndim != 1 or len(phi) == 0:
        raise ConfigurationError("phi_norms must be a nonempty vector")
    if np.any(phi <= 0.0) or np.any(phi < 1.0 / embedding_norm - 1e-15):
        raise ConfigurationError(f"phi_norms must be >= 1/|iota| = {1.0 / embedding_norm}")

    index = np.arange(1, len(phi) + 1, dtype=np.float64)
    # 1 - eta_n = (1 - eta0) 2^-n
    log_gap = np.log1p(-eta0) - index * LOG2
    eta = -np.expm1(log_gap)
    log_radii = log_gap - LOG2 - np.log(phi)

    eta.setflags(write=False)
    log_radii.setflags(write=False)
    logger.debug(f"Holly-Wiciak weights for {len(phi)} modes, eta0={eta0}")
    return HollyWiciakWeights(eta0=eta0, eta=eta, log_radii=log_radii)


def embedding_norm_search(weights: HollyWiciakWeights, phi_norms: np.ndarray, samples: int = 10_000,
                          seed: int = 0) -> float:
    """Largest |x|_Phi / |x|_U over random directions

    Draws Gaussian coefficients on scaled axes so that low and high modes are
    both explored, and also tries every basis vector.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7]))
    phi = np.asarray(phi_norms, dtype=np.float64)
    size = weights.size
    best = 0.0
    for i in range(size):
        unit = np.zeros(size)
        unit[i] = 1.0
        best = max(best, weights.embedding_ratio(unit, phi))

    radii = weights.radii
    for _ in range(samples):
        raw = rng.standard_normal(size)
        scale = np.where(rng.random(size) < 0.5, radii, 1.0)
        x = raw * scale
        if not np.any(x):
            continue
        best = max(best, weights.embedding_ratio(x, phi))
    return best
