"""Skorokhod distance and the weak-ball metric on step paths

d(u, v) = inf over increasing homeomorphisms lambda of [0, T] of
    sup_t rho(u(t), v(lambda(t))) + sup_t |t - lambda(t)| + sup_{s != t} |log slope|.

The infimum is taken over piecewise-linear lambda whose knots pair
candidate times of u with candidate times of v (the largest jumps of each
path, 0 and T). For such lambda the last two terms are attained at knots
and on single pieces, and the first is evaluated exactly on every piece.
The search keeps, per knot pair, the Pareto front of the three partial
suprema. The identity map is always in the class.
"""

import itertools
import logging
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from ..galerkin.path import CadlagPath
from ..utils.errors import BallViolation, ConfigurationError, InsufficientData
from .paths import StatePath, aligned, as_state_path

logger = logging.getLogger("sns_levy.analysis.skorokhod")

DEFAULT_MAX_KNOTS = 6
BRUTEFORCE_KNOTS = 8

Metric = Callable[[np.ndarray, np.ndarray], np.ndarray]
Triple = Tuple[float, float, float]


def euclidean(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return cdist(X, Y)


def q_r_matrix(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Pairwise sum_k 2^-k |x_k - y_k| / (1 + |x_k - y_k|) over coefficient rows"""
    weights = 0.5 ** np.arange(1, X.shape[1] + 1)
    gaps = np.abs(X[:, None, :] - Y[None, :, :])
    return np.sum(weights * gaps / (1.0 + gaps), axis=-1)


def q_r(x: np.ndarray, y: np.ndarray) -> float:
    """Metric of the weak topology on an H-ball, read on the basis coefficients"""
    return float(q_r_matrix(np.atleast_2d(x), np.atleast_2d(y))[0, 0])


def knot_candidates(u: StatePath, v: StatePath, max_knots: int, distances: Callable[[StatePath], np.ndarray]) -> np.ndarray:
    """0, T and the breakpoints carrying the largest jumps of either path"""
    chosen = [0.0, u.horizon]
    for path in (u, v):
        if path.size > 1:
            jumps = distances(path)
            order = np.argsort(-jumps, kind="stable")[:max_knots]
            chosen.extend(path.times[1:][order])
    return np.unique(np.asarray(chosen, dtype=np.float64))


class _Matcher:
    """Piece costs for time changes between two step paths"""

    def __init__(self, u: StatePath, v: StatePath, metric: Metric):
        if abs(u.horizon - v.horizon) > 1e-12:
            raise ConfigurationError(f"Paths have different horizons {u.horizon} and {v.horizon}")
        self.u, self.v = u, v
        self.horizon = u.horizon
        self.distance = metric(u.points, v.points)
        self.endpoint = float(self.distance[u.index_at(self.horizon), v.index_at(self.horizon)])

    def piece_sup(self, a0: float, a1: float, b0: float, b1: float) -> float:
        """sup over t in [a0, a1) of rho(u(t), v(lambda(t))) for lambda linear from (a0, b0) to (a1, b1)"""
        ut, vt = self.u.times, self.v.times
        inner_u = np.nonzero((ut > a0) & (ut < a1))[0]
        inner_v = np.nonzero((vt > b0) & (vt < b1))[0]
        slope = (b1 - b0) / (a1 - a0)
        u_index = np.concatenate([[self.u.index_at(a0)], inner_u, self.u.index_at(a0 + (vt[inner_v] - b0) / slope)])
        v_index = np.concatenate([[self.v.index_at(b0)], self.v.index_at(b0 + (ut[inner_u] - a0) * slope), inner_v])
        return float(np.max(self.distance[u_index.astype(int), v_index.astype(int)]))

    def piece(self, a0: float, a1: float, b0: float, b1: float) -> Triple:
        return (self.piece_sup(a0, a1, b0, b1), abs(a1 - b1), abs(float(np.log((b1 - b0) / (a1 - a0)))))

    def total(self, triple: Triple) -> float:
        return max(triple[0], self.endpoint) + triple[1] + triple[2]


def _combine(x: Triple, y: Triple) -> Triple:
    return (max(x[0], y[0]), max(x[1], y[1]), max(x[2], y[2]))


def _insert(front: List[Triple], candidate: Triple) -> None:
    for kept in front:
        if kept[0] <= candidate[0] and kept[1] <= candidate[1] and kept[2] <= candidate[2]:
            return
    front[:] = [kept for kept in front
                if not (candidate[0] <= kept[0] and candidate[1] <= kept[1] and candidate[2] <= kept[2])]
    front.append(candidate)


def _pareto_search(matcher: _Matcher, knots: np.ndarray) -> Tuple[float, Dict[str, float]]:
    m = len(knots)
    last = m - 1
    fronts: Dict[Tuple[int, int], List[Triple]] = {(0, 0): [(0.0, 0.0, 0.0)]}
    for i in range(last):
        for j in range(last):
            front = fronts.get((i, j))
            if not front:
                continue
            targets = [(i2, j2) for i2 in range(i + 1, last) for j2 in range(j + 1, last)] + [(last, last)]
            for i2, j2 in targets:
                step = matcher.piece(knots[i], knots[i2], knots[j], knots[j2])
                target = fronts.setdefault((i2, j2), [])
                for triple in front:
                    _insert(target, _combine(triple, step))
    final = fronts[(last, last)]
    best = min(final, key=matcher.total)
    return matcher.total(best), {"sup_distance": max(best[0], matcher.endpoint), "sup_shift": best[1],
                                 "sup_log_slope": best[2]}


def _path_jumps(metric: Metric) -> Callable[[StatePath], np.ndarray]:
    def jumps(path: StatePath) -> np.ndarray:
        return np.array([metric(path.points[k:k + 1], path.points[k + 1:k + 2])[0, 0] for k in range(path.size - 1)])
    return jumps


def skorokhod_distance(u: Union[StatePath, CadlagPath], v: Union[StatePath, CadlagPath],
                       max_knots: int = DEFAULT_MAX_KNOTS, space: str = "Uprime",
                       metric: Optional[Metric] = None, details: bool = False):
    """Upper bound on the Skorokhod distance, never above the uniform distance

    Args:
        u, v: Step paths, or Galerkin paths read in ``space``
        max_knots: Largest jumps per path offered as time-change knots
        space: State space of Galerkin paths
        metric: Pairwise distance of value rows, Euclidean by default
        details: Also return the three terms of the optimum

    Returns:
        The distance, or (distance, terms) when ``details`` is set
    """
    metric = metric or euclidean
    su, sv = as_state_path(u, space), as_state_path(v, space)
    su, sv = aligned(su, sv)
    matcher = _Matcher(su, sv, metric)
    knots = knot_candidates(su, sv, max_knots, _path_jumps(metric))
    value, terms = _pareto_search(matcher, knots)
    logger.debug(f"Skorokhod search over {len(knots)} knots: {value:.6g}")
    return (value, terms) if details else value


def skorokhod_bruteforce(u: Union[StatePath, CadlagPath], v: Union[StatePath, CadlagPath],
                         max_knots: int = DEFAULT_MAX_KNOTS, space: str = "Uprime",
                         metric: Optional[Metric] = None) -> float:
    """Same time-change class as ``skorokhod_distance``, enumerated exhaustively"""
    metric = metric or euclidean
    su, sv = as_state_path(u, space), as_state_path(v, space)
    su, sv = aligned(su, sv)
    matcher = _Matcher(su, sv, metric)
    knots = knot_candidates(su, sv, max_knots, _path_jumps(metric))
    interior = list(range(1, len(knots) - 1))
    if len(interior) > BRUTEFORCE_KNOTS:
        raise InsufficientData(f"{len(interior)} interior knots exceed the enumeration limit {BRUTEFORCE_KNOTS}")
    last = len(knots) - 1
    best = np.inf
    for size in range(len(interior) + 1):
        for left in itertools.combinations(interior, size):
            for right in itertools.combinations(interior, size):
                a = (0, *left, last)
                b = (0, *right, last)
                triple = (0.0, 0.0, 0.0)
                for k in range(len(a) - 1):
                    triple = _combine(triple, matcher.piece(knots[a[k]], knots[a[k + 1]], knots[b[k]], knots[b[k + 1]]))
                best = min(best, matcher.total(triple))
    return float(best)


def uniform_distance(u: Union[StatePath, CadlagPath], v: Union[StatePath, CadlagPath], space: str = "Uprime",
                     metric: Optional[Metric] = None) -> float:
    """sup_t rho(u(t), v(t))"""
    metric = metric or euclidean
    su, sv = as_state_path(u, space), as_state_path(v, space)
    su, sv = aligned(su, sv)
    times = np.union1d(su.times, sv.times)
    distance = metric(su.points, sv.points)
    return float(np.max(distance[su.index_at(times), sv.index_at(times)]))


def weak_ball_metric(u: CadlagPath, v: CadlagPath, r: float, max_knots: int = DEFAULT_MAX_KNOTS) -> float:
    """Skorokhod-type distance on paths in the H-ball of radius r with the weak metric q_r

    Raises:
        BallViolation: if either path leaves the ball
    """
    for name, path in (("u", u), ("v", v)):
        sup = path.sup_h_norm()
        if sup > r * (1.0 + 1e-12):
            raise BallViolation(f"Path {name} reaches |u|_H = {sup:.6g} outside the ball of radius {r}")
    return skorokhod_distance(u, v, max_knots=max_knots, space="H", metric=q_r_matrix)
