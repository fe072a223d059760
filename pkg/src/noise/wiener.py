"""Truncated cylindrical Wiener increments and within-step Brownian bridges"""

from dataclasses import dataclass
from typing import Dict

import numpy as np

from ..utils.errors import ConfigurationError
from .poisson import stream_rng

WIENER_STREAM_ID = 1
BRIDGE_STREAM_ID = 2


def time_grid(T: float, dt: float) -> np.ndarray:
    """0 = t_0 < t_1 < ... < t_K = T with steps dt, the last one possibly shorter"""
    if T <= 0 or dt <= 0:
        raise ConfigurationError(f"Need T > 0 and dt > 0, got T={T}, dt={dt}")
    steps = max(1, int(np.ceil(T / dt - 1e-9)))
    grid = np.arange(steps + 1, dtype=np.float64) * dt
    grid[-1] = T
    return grid


@dataclass(frozen=True)
class WienerConfig:
    """K retained Wiener modes on the time grid of (T, dt)"""

    modes: int
    dt: float
    horizon: float
    seed: int
    stream_id: int = WIENER_STREAM_ID

    def __post_init__(self):
        if self.modes < 1:
            raise ConfigurationError(f"At least one Wiener mode is required, got {self.modes}")
        if self.dt <= 0 or self.horizon <= 0:
            raise ConfigurationError("Wiener grid needs dt > 0 and T > 0")

    @property
    def grid(self) -> np.ndarray:
        return time_grid(self.horizon, self.dt)


def wiener_increments(cfg: WienerConfig) -> np.ndarray:
    """Independent N(0, h_k) increments, shape (steps, K)"""
    steps = np.diff(cfg.grid)
    rng = stream_rng(cfg.seed, cfg.stream_id)
    return np.sqrt(steps)[:, None] * rng.standard_normal((len(steps), cfg.modes))


class BrownianBridge:
    """Wiener values inside grid steps, conditioned on the step increment

    Each step gets its own dyadic bridge seeded by (seed, stream, step), so
    the value at a time does not depend on which other times are queried.
    Values between dyadic nodes are linearly interpolated.
    """

    def __init__(self, seed: int, depth: int = 8, stream_id: int = BRIDGE_STREAM_ID):
        self.seed = seed
        self.depth = depth
        self.stream_id = stream_id
        self._cache: Dict[int, np.ndarray] = {}

    def _nodes(self, step: int, increment: np.ndarray, h: float) -> np.ndarray:
        if step in self._cache:
            return self._cache[step]
        cells = 2 ** self.depth
        rng = stream_rng(self.seed, self.stream_id, step)
        values = np.zeros((cells + 1, len(increment)))
        values[-1] = increment
        span = cells
        while span > 1:
            half = span // 2
            mids = np.arange(half, cells, span)
            # conditional variance of the midpoint given both ends
            spread = np.sqrt(half * h / cells / 2.0)
            values[mids] = 0.5 * (values[mids - half] + values[mids + half]) \
                + spread * rng.standard_normal((len(mids), len(increment)))
            span = half
        self._cache[step] = values
        return values

    def values(self, step: int, increment: np.ndarray, h: float, offsets: np.ndarray) -> np.ndarray:
        """W(t_step + s) - W(t_step) at offsets 0 <= s <= h, shape (len(offsets), K)"""
        nodes = self._nodes(step, np.asarray(increment, dtype=np.float64), h)
        cells = len(nodes) - 1
        position = np.clip(np.asarray(offsets, dtype=np.float64) / h, 0.0, 1.0) * cells
        left = np.minimum(np.floor(position).astype(int), cells - 1)
        fraction = (position - left)[:, None]
        return nodes[left] + fraction * (nodes[left + 1] - nodes[left])

    def release(self, step: int) -> None:
        self._cache.pop(step, None)
