"""Piecewise-constant paths in a metric state space

Every functional in this package works on a ``StatePath``: strictly
increasing breakpoint times starting at 0, right-continuous values in
coordinates whose Euclidean distance is the metric of the state space, and
a horizon T >= last breakpoint.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..galerkin.path import CadlagPath
from ..spectral.field import SpectralField
from ..utils.errors import ConfigurationError

SPACES = ("H", "V", "Uprime")


def _dedupe(times: np.ndarray, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Keep the last value of every repeated time"""
    keep = np.append(times[1:] != times[:-1], True)
    return times[keep], values[keep]


@dataclass(frozen=True)
class StatePath:
    """Right-continuous step path t -> points[k] on [times[k], times[k+1])"""

    times: np.ndarray
    points: np.ndarray
    horizon: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        if len(times) == 0 or times[0] != 0.0:
            raise ConfigurationError("A path must start with a breakpoint at t = 0")
        if np.any(np.diff(times) <= 0):
            raise ConfigurationError("Breakpoint times must increase strictly")
        if len(points) != len(times):
            raise ConfigurationError("One value per breakpoint is required")
        if self.horizon < times[-1]:
            raise ConfigurationError(f"Horizon {self.horizon} precedes the last breakpoint {times[-1]}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "points", points)

    @property
    def size(self) -> int:
        return len(self.times)

    def index_at(self, ts) -> np.ndarray:
        return np.maximum(np.searchsorted(self.times, np.asarray(ts, dtype=np.float64), side="right") - 1, 0)

    def value_at(self, t: float) -> np.ndarray:
        return self.points[int(self.index_at(t))]

    def values_at(self, ts) -> np.ndarray:
        return self.points[self.index_at(ts)]

    def diameter(self) -> float:
        """Largest distance between two values of the path"""
        if self.size < 2:
            return 0.0
        diffs = self.points[:, None, :] - self.points[None, :, :]
        return float(np.sqrt(np.max(np.sum(diffs * diffs, axis=-1))))


@dataclass(frozen=True)
class RealCadlagPath(StatePath):
    """Real-valued step path"""

    @classmethod
    def from_breakpoints(cls, times: Sequence[float], values: Sequence[float], horizon: float) -> "RealCadlagPath":
        times, values = _dedupe(np.asarray(times, dtype=np.float64), np.asarray(values, dtype=np.float64))
        return cls(times, values, horizon)

    @classmethod
    def constant(cls, value: float, horizon: float) -> "RealCadlagPath":
        return cls(np.array([0.0]), np.array([value]), horizon)

    @classmethod
    def with_jumps(cls, horizon: float, jumps: Sequence[Tuple[float, float]], start: float = 0.0) -> "RealCadlagPath":
        """Path starting at ``start`` with jumps (time, size) in (0, T]"""
        ordered = sorted(jumps)
        times = [0.0] + [t for t, _ in ordered]
        values = np.cumsum([start] + [size for _, size in ordered])
        return cls.from_breakpoints(times, values, horizon)

    @property
    def values(self) -> np.ndarray:
        return self.points[:, 0]


def state_coordinates(path: CadlagPath, space: str = "Uprime") -> np.ndarray:
    """Coefficients scaled so that Euclidean distance is the norm of ``space``"""
    if space not in SPACES:
        raise ConfigurationError(f"Unknown state space '{space}', expected one of {SPACES}")
    n = path.n
    if space == "H":
        scale = np.ones(n)
    elif space == "V":
        scale = np.sqrt(1.0 + path.basis.eigenvalues[:n])
    else:
        scale = path.basis.u_radii[:n]
    return path.states * scale[None, :]


def as_state_path(path: Union[StatePath, CadlagPath], space: str = "Uprime") -> StatePath:
    """View a Galerkin path (or pass through a step path) in a metric state space"""
    if isinstance(path, StatePath):
        return path
    if isinstance(path, CadlagPath):
        times, points = _dedupe(path.times, state_coordinates(path, space))
        return StatePath(times, points, max(path.horizon, float(times[-1])))
    raise ConfigurationError(f"Cannot read {type(path).__name__} as a path")


def weak_projection_path(path: CadlagPath, h: SpectralField) -> RealCadlagPath:
    """t -> <u(t), h>_H at every recorded event"""
    if h.basis is not path.basis:
        raise ConfigurationError("Test field and path live on different bases")
    values = path.states @ h.coeffs[:path.n]
    return RealCadlagPath.from_breakpoints(path.times, values, path.horizon)


def candidate_times(path: StatePath, refine: int = 0, extra: Optional[np.ndarray] = None) -> np.ndarray:
    """Breakpoints, T and an optional uniform refinement, sorted and unique"""
    parts = [path.times, [path.horizon]]
    if refine > 0:
        parts.append(np.linspace(0.0, path.horizon, refine + 1))
    if extra is not None:
        parts.append(np.asarray(extra, dtype=np.float64))
    candidates = np.unique(np.concatenate([np.asarray(p, dtype=np.float64) for p in parts]))
    return candidates[(candidates >= 0.0) & (candidates <= path.horizon)]


def aligned(u: StatePath, v: StatePath) -> Tuple[StatePath, StatePath]:
    """Zero-pad the coordinates of the narrower path (Galerkin paths at different levels)"""
    width = max(u.points.shape[1], v.points.shape[1])

    def widen(path: StatePath) -> StatePath:
        if path.points.shape[1] == width:
            return path
        points = np.zeros((path.size, width))
        points[:, :path.points.shape[1]] = path.points
        return StatePath(path.times, points, path.horizon)

    return widen(u), widen(v)
