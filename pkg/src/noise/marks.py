"""Mark spaces Y with finite intensity measures nu"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy import special

from ..utils.errors import ConfigurationError

logger = logging.getLogger("sns_levy.noise.marks")


class MarkSpaceSpec:
    """Base class of a mark space with a finite (possibly truncated) intensity"""

    kind = "abstract"

    @property
    def total_mass(self) -> float:
        raise NotImplementedError("Subclasses must implement total_mass")

    @property
    def mark_dim(self) -> int:
        raise NotImplementedError("Subclasses must implement mark_dim")

    @property
    def truncation_note(self) -> Optional[str]:
        return None

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Draw ``count`` i.i.d. marks from nu / nu(Y), shape (count, mark_dim)"""
        raise NotImplementedError("Subclasses must implement sample")

    def quadrature(self, order: int = 8) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes (Q, mark_dim) and weights (Q,) with sum of weights = nu(Y)"""
        raise NotImplementedError("Subclasses must implement quadrature")

    def measure(self, low, high) -> float:
        """nu of the box [low, high) intersected with Y"""
        raise NotImplementedError("Subclasses must implement measure")

    def moment(self, p: float, order: int = 16) -> float:
        """int |y|^p nu(dy)"""
        nodes, weights = self.quadrature(order)
        return float(np.dot(weights, np.linalg.norm(nodes, axis=1) ** p))

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError("Subclasses must implement to_dict")

    def _check_mass(self):
        if not np.isfinite(self.total_mass) or self.total_mass <= 0.0:
            raise ConfigurationError(f"Intensity must have finite positive mass, got {self.total_mass}")


@dataclass
class AtomicMarks(MarkSpaceSpec):
    """Finite mark set with nonnegative weights nu({y_k}) = w_k"""

    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    kind = "atoms"

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        self.points = points.reshape(len(points), -1)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if len(self.points) != len(self.weights) or np.any(self.weights < 0):
            raise ConfigurationError("Atoms need one nonnegative weight per point")
        self._check_mass()
        self._cumulative = np.cumsum(self.weights) / self.weights.sum()

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def mark_dim(self) -> int:
        return self.points.shape[1]

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        index = np.searchsorted(self._cumulative, rng.random(count), side="right")
        return self.points[np.minimum(index, len(self.points) - 1)]

    def quadrature(self, order: int = 8) -> Tuple[np.ndarray, np.ndarray]:
        return self.points, self.weights

    def measure(self, low, high) -> float:
        inside = np.all((self.points >= np.asarray(low)) & (self.points < np.asarray(high)), axis=1)
        return float(np.sum(self.weights[inside]))

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "points": self.points.tolist(), "weights": self.weights.tolist()}


@dataclass
class BoxMarks(MarkSpaceSpec):
    """Uniform density on a box [low, high) of R^j with total mass ``mass``"""

    low: np.ndarray = field(repr=False)
    high: np.ndarray = field(repr=False)
    mass: float = 1.0
    kind = "box"

    def __post_init__(self):
        self.low = np.atleast_1d(np.asarray(self.low, dtype=np.float64))
        self.high = np.atleast_1d(np.asarray(self.high, dtype=np.float64))
        if self.low.shape != self.high.shape or np.any(self.high <= self.low):
            raise ConfigurationError("Mark box needs low < high componentwise")
        self._check_mass()

    @property
    def total_mass(self) -> float:
        return float(self.mass)

    @property
    def mark_dim(self) -> int:
        return len(self.low)

    @property
    def volume(self) -> float:
        return float(np.prod(self.high - self.low))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=(count, self.mark_dim))

    def quadrature(self, order: int = 8) -> Tuple[np.ndarray, np.ndarray]:
        x, w = special.roots_legendre(order)
        axes = [self.low[j] + (self.high[j] - self.low[j]) * (x + 1.0) / 2.0 for j in range(self.mark_dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        nodes = np.stack([m.ravel() for m in mesh], axis=1)
        weight_mesh = np.meshgrid(*([w / 2.0] * self.mark_dim), indexing="ij")
        weights = np.prod(np.stack([m.ravel() for m in weight_mesh]), axis=0) * self.mass
        return nodes, weights

    def measure(self, low, high) -> float:
        lo = np.maximum(np.asarray(low, dtype=np.float64), self.low)
        hi = np.minimum(np.asarray(high, dtype=np.float64), self.high)
        overlap = np.prod(np.clip(hi - lo, 0.0, None))
        return float(self.mass * overlap / self.volume)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "low": self.low.tolist(), "high": self.high.tolist(), "mass": self.mass}


@dataclass
class PowerLawMarks(MarkSpaceSpec):
    """Scalar marks with density c * y^(-1-alpha) truncated to [epsilon, y_max]

    The untruncated measure is sigma-finite for alpha > 0; the small jumps
    below epsilon are dropped and not re-added as drift.
    """

    alpha: float
    scale: float = 1.0
    epsilon: float = 0.1
    y_max: float = 1.0
    kind = "power"

    def __post_init__(self):
        if not 0.0 < self.epsilon < self.y_max:
            raise ConfigurationError("Power-law truncation needs 0 < epsilon < y_max")
        if self.scale <= 0.0:
            raise ConfigurationError("Power-law scale must be positive")
        self._check_mass()
        if self.alpha >= 0:
            logger.warning(f"Sigma-finite intensity truncated at epsilon={self.epsilon}: {self.truncation_note}")

    def _antiderivative(self, y):
        # int y^(-1-alpha) dy
        y = np.asarray(y, dtype=np.float64)
        if self.alpha == 0.0:
            return np.log(y)
        return -y ** (-self.alpha) / self.alpha

    @property
    def total_mass(self) -> float:
        return float(self.scale * (self._antiderivative(self.y_max) - self._antiderivative(self.epsilon)))

    @property
    def mark_dim(self) -> int:
        return 1

    @property
    def truncation_note(self) -> Optional[str]:
        if self.alpha < 0:
            return None
        return (f"marks below {self.epsilon} discarded; retained mass {self.total_mass:.6g}, "
                f"small-jump compensator not re-added")

    def _inverse_cdf(self, u: np.ndarray) -> np.ndarray:
        lo, hi = self._antiderivative(self.epsilon), self._antiderivative(self.y_max)
        level = lo + u * (hi - lo)
        if self.alpha == 0.0:
            return np.exp(level)
        return (-self.alpha * level) ** (-1.0 / self.alpha)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self._inverse_cdf(rng.random(count))[:, None]

    def quadrature(self, order: int = 8) -> Tuple[np.ndarray, np.ndarray]:
        # Gauss-Legendre in s = log y, where the integrand c y^-alpha ds is smooth
        x, w = special.roots_legendre(order)
        a, b = np.log(self.epsilon), np.log(self.y_max)
        s = a + (b - a) * (x + 1.0) / 2.0
        y = np.exp(s)
        weights = w * (b - a) / 2.0 * self.scale * y ** (-self.alpha)
        return y[:, None], weights

    def measure(self, low, high) -> float:
        lo = max(float(np.atleast_1d(low)[0]), self.epsilon)
        hi = min(float(np.atleast_1d(high)[0]), self.y_max)
        if hi <= lo:
            return 0.0
        return float(self.scale * (self._antiderivative(hi) - self._antiderivative(lo)))

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "alpha": self.alpha, "scale": self.scale,
                "epsilon": self.epsilon, "y_max": self.y_max}


def mark_space_from_dict(payload: Dict[str, Any]) -> MarkSpaceSpec:
    """Build a mark space from its configuration block"""
    kind = payload.get("kind")
    if kind == "atoms":
        return AtomicMarks(points=payload["points"], weights=payload["weights"])
    if kind == "box":
        return BoxMarks(low=payload["low"], high=payload["high"], mass=payload.get("mass", 1.0))
    if kind == "power":
        return PowerLawMarks(alpha=payload["alpha"], scale=payload.get("scale", 1.0),
                             epsilon=payload.get("epsilon", 0.1), y_max=payload.get("y_max", 1.0))
    raise ConfigurationError(f"Unknown mark space kind: {kind}")
