"""Time-homogeneous Poisson random measures on [0, T] x Y and compensated integrals"""

import io
import csv
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..utils.errors import ConfigurationError
from .marks import MarkSpaceSpec

logger = logging.getLogger("sns_levy.noise.poisson")

JUMP_STREAM_ID = 0


def stream_rng(seed: int, stream_id: int, *extra: int) -> np.random.Generator:
    """Independent generator for (seed, stream id, ...) that needs no shared state"""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(stream_id), *map(int, extra)]))


@dataclass(frozen=True)
class JumpStream:
    """Ordered events (t_j, y_j) of one realisation, times strictly increasing in (0, T]"""

    times: np.ndarray = field(repr=False)
    marks: np.ndarray = field(repr=False)
    horizon: float
    seed: int
    total_mass: float

    @property
    def count(self) -> int:
        return len(self.times)

    def window_count(self, start: float, end: float) -> int:
        """eta((start, end] x Y)"""
        return int(np.searchsorted(self.times, end, side="right") - np.searchsorted(self.times, start, side="right"))

    def count_in(self, end: float, low, high) -> int:
        """eta((0, end] x [low, high))"""
        upto = self.times <= end
        inside = np.all((self.marks >= np.asarray(low)) & (self.marks < np.asarray(high)), axis=1)
        return int(np.sum(upto & inside))

    def events_in(self, start: float, end: float):
        """Slice of (times, marks) with start < t <= end"""
        lo = np.searchsorted(self.times, start, side="right")
        hi = np.searchsorted(self.times, end, side="right")
        return self.times[lo:hi], self.marks[lo:hi]

    def with_event(self, time: float, mark) -> "JumpStream":
        """Copy with one more event inserted in time order"""
        position = int(np.searchsorted(self.times, time))
        times = np.insert(self.times, position, time)
        marks = np.insert(self.marks, position, np.atleast_1d(mark), axis=0)
        return JumpStream(times, marks, self.horizon, self.seed, self.total_mass)

    def csv_text(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["t", *[f"y{j + 1}" for j in range(self.marks.shape[1])]])
        for t, y in zip(self.times, self.marks):
            writer.writerow([repr(float(t)), *[repr(float(v)) for v in y]])
        return buffer.getvalue()

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(self.csv_text())


def sample_jumps(spec: MarkSpaceSpec, T: float, seed: int, stream_id: int = JUMP_STREAM_ID) -> JumpStream:
    """Draw a Poisson random measure with intensity Lebesgue x nu on (0, T] x Y

    The count is Poisson(T nu(Y)), times are uniform order statistics and
    marks are i.i.d. nu / nu(Y).
    """
    if T <= 0:
        raise ConfigurationError(f"Horizon must be positive, got {T}")
    if spec.total_mass <= 0:
        raise ConfigurationError("Intensity with nu(Y) = 0 has no jumps to sample")
    rng = stream_rng(seed, stream_id)
    count = int(rng.poisson(T * spec.total_mass))
    # T - U(0, T) lies in (0, T]
    times = np.sort(T - rng.uniform(0.0, T, size=count))
    marks = spec.sample(rng, count).reshape(count, spec.mark_dim)
    if count > 1 and np.any(np.diff(times) <= 0):
        raise ConfigurationError("Coincident jump times drawn; use another seed")
    logger.debug(f"Sampled {count} jumps on (0, {T}] (mean {T * spec.total_mass:.4g})")
    return JumpStream(times, marks, float(T), int(seed), spec.total_mass)


def compensated_integral(integrand: Callable[[float, np.ndarray], np.ndarray], jumps: JumpStream,
                         spec: MarkSpaceSpec, T: float, time_grid: Optional[np.ndarray] = None,
                         time_steps: int = 64, quadrature_order: int = 8) -> np.ndarray:
    """int_0^T int_Y xi(s, y) eta~(ds, dy) for an H-valued integrand

    Args:
        integrand: xi(s, y) returning a coefficient vector
        jumps: Realisation of eta on (0, T]
        spec: Mark space of the realisation
        T: Upper limit
        time_grid: Step boundaries on which xi is piecewise constant (left value);
            the midpoint rule on ``time_steps`` cells is used otherwise
        time_steps: Number of midpoint cells
        quadrature_order: Gauss order of the nu quadrature

    Returns:
        Coefficients of the compensated integral
    """
    nodes, weights = spec.quadrature(quadrature_order)
    times, marks = jumps.events_in(0.0, T)

    if time_grid is not None:
        grid = np.asarray(time_grid, dtype=np.float64)
        grid = grid[grid <= T]
        if grid[-1] < T:
            grid = np.append(grid, T)
        evaluation_times, durations = grid[:-1], np.diff(grid)
    else:
        edges = np.linspace(0.0, T, time_steps + 1)
        evaluation_times, durations = (edges[:-1] + edges[1:]) / 2.0, np.diff(edges)

    compensator = None
    for s, h in zip(evaluation_times, durations):
        cell = sum(w * np.asarray(integrand(s, y), dtype=np.float64) for y, w in zip(nodes, weights))
        compensator = h * cell if compensator is None else compensator + h * cell
    if compensator is None or not np.all(np.isfinite(compensator)):
        raise ConfigurationError("Compensator quadrature produced a non-finite value")

    total = np.zeros_like(compensator)
    for t, y in zip(times, marks):
        total = total + np.asarray(integrand(t, y), dtype=np.float64)
    return total - compensator
