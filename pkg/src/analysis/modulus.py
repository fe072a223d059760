"""Modulus of a cadlag path

w(u, delta) = inf over partitions 0 = t_0 < ... < t_k = T with all gaps
>= delta of the largest oscillation of u on a half-open cell [t_i, t_{i+1}).
Partition points are drawn from the breakpoints of the path, T and an
optional uniform refinement.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from ..galerkin.path import CadlagPath
from ..utils.errors import ConfigurationError, InsufficientData
from .paths import StatePath, as_state_path, candidate_times

logger = logging.getLogger("sns_levy.analysis.modulus")

BRUTEFORCE_LIMIT = 14
SPACING_SLACK = 1e-12


def oscillation_table(path: StatePath, candidates: np.ndarray) -> np.ndarray:
    """osc[i, j] = diameter of the values taken on [c_i, c_j) for i < j"""
    values = path.values_at(candidates)
    distances = cdist(values, values)
    m = len(candidates)
    osc = np.zeros((m, m))
    # grow cells one candidate at a time along the diagonals
    for length in range(2, m):
        i = np.arange(m - length)
        osc[i, i + length] = np.maximum(np.maximum(osc[i + 1, i + length], osc[i, i + length - 1]),
                                        distances[i, i + length - 1])
    return osc


def _prepare(path, delta: float, refine: int, space: str) -> Tuple[StatePath, np.ndarray]:
    state = as_state_path(path, space)
    if not 0 < delta <= state.horizon:
        raise ConfigurationError(f"delta must lie in (0, T] = (0, {state.horizon}], got {delta}")
    return state, candidate_times(state, refine)


def _admissible(candidates: np.ndarray, delta: float) -> np.ndarray:
    gaps = candidates[None, :] - candidates[:, None]
    return gaps >= delta - SPACING_SLACK * max(candidates[-1], 1.0)


def modulus(path: Union[StatePath, CadlagPath], delta: float, refine: int = 0, space: str = "Uprime") -> float:
    """w(u, delta) by dynamic programming over candidate partition points

    Args:
        path: Step path, or a Galerkin path read in ``space``
        delta: Minimal gap of the partition, in (0, T]
        refine: Number of uniform cells added to the candidate points
        space: State space of a Galerkin path (H, V or Uprime)

    Returns:
        The smallest achievable largest-cell oscillation
    """
    state, candidates = _prepare(path, delta, refine, space)
    return _modulus_from_table(oscillation_table(state, candidates), _admissible(candidates, delta))


def _modulus_from_table(osc: np.ndarray, admissible: np.ndarray) -> float:
    m = osc.shape[0]
    best = np.full(m, np.inf)
    best[0] = 0.0
    for j in range(1, m):
        allowed = admissible[:j, j] & np.isfinite(best[:j])
        if np.any(allowed):
            best[j] = float(np.min(np.maximum(best[:j], osc[:j, j])[allowed]))
    return float(best[-1])


def modulus_bruteforce(path: Union[StatePath, CadlagPath], delta: float, refine: int = 0,
                       space: str = "Uprime") -> float:
    """w(u, delta) by enumerating every admissible subset of interior candidates"""
    state, candidates = _prepare(path, delta, refine, space)
    interior = len(candidates) - 2
    if interior > BRUTEFORCE_LIMIT:
        raise InsufficientData(f"{interior} interior candidates exceed the enumeration limit {BRUTEFORCE_LIMIT}")
    osc = oscillation_table(state, candidates)
    admissible = _admissible(candidates, delta)
    last = len(candidates) - 1
    best = np.inf
    for size in range(interior + 1):
        for chosen in itertools.combinations(range(1, last), size):
            points = (0, *chosen, last)
            if all(admissible[a, b] for a, b in zip(points[:-1], points[1:])):
                best = min(best, max(osc[a, b] for a, b in zip(points[:-1], points[1:])))
    return float(best)


@dataclass
class ModulusCurve:
    """(delta, w) pairs with delta decreasing"""

    deltas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        order = np.argsort(-np.asarray(self.deltas, dtype=np.float64))
        self.deltas = np.asarray(self.deltas, dtype=np.float64)[order]
        self.values = np.asarray(self.values, dtype=np.float64)[order]

    @property
    def is_monotone(self) -> bool:
        """w does not grow as delta decreases"""
        return bool(np.all(np.diff(self.values) <= 1e-12))

    @property
    def smallest_delta_value(self) -> float:
        return float(self.values[-1])

    def to_dict(self) -> Dict[str, Any]:
        return {"deltas": self.deltas.tolist(), "values": self.values.tolist()}

    def rows(self) -> List[Tuple[float, float]]:
        return list(zip(self.deltas.tolist(), self.values.tolist()))


def modulus_curve(path: Union[StatePath, CadlagPath], deltas: Sequence[float], refine: int = 0,
                  space: str = "Uprime") -> ModulusCurve:
    """Modulus at every delta of a grid, sharing one oscillation table"""
    state = as_state_path(path, space)
    candidates = candidate_times(state, refine)
    osc = oscillation_table(state, candidates)
    values = []
    for delta in deltas:
        if not 0 < delta <= state.horizon:
            raise ConfigurationError(f"delta must lie in (0, T] = (0, {state.horizon}], got {delta}")
        values.append(_modulus_from_table(osc, _admissible(candidates, delta)))
    return ModulusCurve(np.asarray(deltas, dtype=np.float64), np.asarray(values))
