"""Empirical Aldous tables: increments of an ensemble after stopping times"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy import stats

from ..galerkin.path import CadlagPath
from ..noise.poisson import stream_rng
from ..utils.errors import ConfigurationError, InsufficientData
from .paths import RealCadlagPath, StatePath, as_state_path

logger = logging.getLogger("sns_levy.analysis.aldous")

PathLike = Union[StatePath, CadlagPath]


@dataclass(frozen=True)
class StoppingRule:
    """Family of stopping times: fixed times, or first hitting of an H-norm level

    A level that is never reached stops the path at T.
    """

    kind: str
    times: tuple = ()
    level: float = 0.0

    def __post_init__(self):
        if self.kind not in ("deterministic", "hitting"):
            raise ConfigurationError(f"Unknown stopping rule '{self.kind}'")
        if self.kind == "deterministic" and not self.times:
            raise ConfigurationError("Deterministic stopping needs at least one time")

    @classmethod
    def deterministic(cls, times: Sequence[float]) -> "StoppingRule":
        return cls("deterministic", tuple(float(t) for t in times))

    @classmethod
    def hitting(cls, level: float) -> "StoppingRule":
        return cls("hitting", level=float(level))

    @classmethod
    def parse(cls, text: str) -> "StoppingRule":
        """``deterministic:0,0.5`` or ``hitting:1.5``"""
        kind, _, argument = text.partition(":")
        if kind == "deterministic":
            return cls.deterministic([float(t) for t in argument.split(",") if t])
        if kind == "hitting":
            return cls.hitting(float(argument))
        raise ConfigurationError(f"Unknown stopping rule '{text}'")

    def stopping_times(self, path: PathLike) -> List[float]:
        if self.kind == "deterministic":
            return list(self.times)
        if isinstance(path, CadlagPath):
            norms, times, horizon = path.h_norms(), path.times, path.horizon
        else:
            norms, times, horizon = np.linalg.norm(path.points, axis=1), path.times, path.horizon
        hits = np.nonzero(norms >= self.level)[0]
        return [float(times[hits[0]]) if len(hits) else float(horizon)]

    def describe(self) -> str:
        if self.kind == "deterministic":
            return "deterministic:" + ",".join(f"{t:g}" for t in self.times)
        return f"hitting:{self.level:g}"


@dataclass
class AldousTable:
    """P(|X(tau + theta) - X(tau)| >= eta) per (theta, eta), worst stopping time of the family

    ``probabilities[i, j]`` belongs to thetas[i], etas[j]; ``sup_probabilities``
    takes the running maximum over theta' <= theta.
    """

    thetas: np.ndarray
    etas: np.ndarray
    probabilities: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    sup_probabilities: np.ndarray
    paths: int
    excess_mass: float
    rule: str
    confidence: float = 0.95
    bounds: Optional[np.ndarray] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def rows(self) -> List[Dict[str, float]]:
        out = []
        for i, theta in enumerate(self.thetas):
            for j, eta in enumerate(self.etas):
                row = {"theta": float(theta), "eta": float(eta), "probability": float(self.probabilities[i, j]),
                       "ci_low": float(self.ci_low[i, j]), "ci_high": float(self.ci_high[i, j]),
                       "sup_probability": float(self.sup_probabilities[i, j])}
                if self.bounds is not None:
                    row["moment_bound"] = float(self.bounds[i, j])
                out.append(row)
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {"rule": self.rule, "paths": self.paths, "confidence": self.confidence,
                "excess_mass": self.excess_mass, "rows": self.rows(), **self.extra}


def _increments(paths: Sequence[PathLike], rule: StoppingRule, thetas: np.ndarray, space: str):
    """|X((tau + theta) ^ T) - X(tau)| per stopping time, path and theta, plus the excess fraction"""
    per_tau: List[np.ndarray] = []
    excess = 0
    total = 0
    taus_by_path = [rule.stopping_times(p) for p in paths]
    count = len(taus_by_path[0])
    for k in range(count):
        rows = []
        for path, taus in zip(paths, taus_by_path):
            state = as_state_path(path, space)
            tau = min(taus[k], state.horizon)
            later = np.minimum(tau + thetas, state.horizon)
            excess += int(np.sum(tau + thetas > state.horizon))
            total += len(thetas)
            rows.append(np.linalg.norm(state.values_at(later) - state.value_at(tau), axis=1))
        per_tau.append(np.array(rows))
    return per_tau, excess / total if total else 0.0


def wilson_interval(successes: int, trials: int, confidence: float = 0.95):
    interval = stats.binomtest(int(successes), int(trials)).proportion_ci(confidence_level=confidence, method="wilson")
    return float(interval.low), float(interval.high)


def aldous_estimate(paths: Sequence[PathLike], rule: StoppingRule, thetas: Sequence[float], etas: Sequence[float],
                    space: str = "Uprime", confidence: float = 0.95) -> AldousTable:
    """Empirical Aldous probabilities with Wilson intervals

    Args:
        paths: Ensemble paths (Galerkin paths are read in ``space``)
        rule: Stopping-time family
        thetas: Increments theta >= 0
        etas: Thresholds eta > 0
        space: State space of Galerkin paths
        confidence: Level of the Wilson intervals

    Returns:
        Table over (theta, eta); times past T are read at T and their share reported as excess mass
    """
    if not paths:
        raise InsufficientData("Aldous estimate needs at least one path")
    thetas = np.asarray(thetas, dtype=np.float64)
    etas = np.asarray(etas, dtype=np.float64)
    if np.any(thetas < 0) or np.any(etas <= 0):
        raise ConfigurationError("Need theta >= 0 and eta > 0")
    per_tau, excess = _increments(paths, rule, thetas, space)
    if excess > 0:
        logger.warning(f"{100 * excess:.1f}% of tau + theta exceed T and are read at T")

    M = len(paths)
    shape = (len(thetas), len(etas))
    probabilities, low, high = np.zeros(shape), np.zeros(shape), np.zeros(shape)
    for i in range(len(thetas)):
        for j, eta in enumerate(etas):
            # worst stopping time of the family
            counts = [int(np.sum(increments[:, i] >= eta)) for increments in per_tau]
            hits = max(counts)
            probabilities[i, j] = hits / M
            low[i, j], high[i, j] = wilson_interval(hits, M, confidence)
    running = np.maximum.accumulate(probabilities[np.argsort(thetas)], axis=0)
    sup_probabilities = np.empty_like(running)
    sup_probabilities[np.argsort(thetas)] = running
    return AldousTable(thetas, etas, probabilities, low, high, sup_probabilities, M, excess, rule.describe(), confidence)


def aldous_moment_estimate(paths: Sequence[PathLike], rule: StoppingRule, thetas: Sequence[float], alpha: float,
                           etas: Optional[Sequence[float]] = None, space: str = "Uprime") -> Dict[str, Any]:
    """Fit E|X(tau + theta) - X(tau)|^alpha ~ C theta^beta and the Chebyshev bound C theta^beta / eta^alpha

    Returns:
        Moments per theta, fitted C and beta (NaN when fewer than two positive moments)
        and the bound table when ``etas`` are given
    """
    if not paths:
        raise InsufficientData("Aldous moment estimate needs at least one path")
    if alpha <= 0:
        raise ConfigurationError(f"alpha must be positive, got {alpha}")
    thetas = np.asarray(thetas, dtype=np.float64)
    per_tau, _ = _increments(paths, rule, thetas, space)
    moments = np.max([np.mean(increments ** alpha, axis=0) for increments in per_tau], axis=0)
    usable = (thetas > 0) & (moments > 0)
    C, beta = float("nan"), float("nan")
    if np.sum(usable) >= 2:
        fit = stats.linregress(np.log(thetas[usable]), np.log(moments[usable]))
        C, beta = float(np.exp(fit.intercept)), float(fit.slope)
    result: Dict[str, Any] = {"alpha": alpha, "thetas": thetas.tolist(), "moments": moments.tolist(),
                              "C": C, "beta": beta}
    if etas is not None:
        etas = np.asarray(etas, dtype=np.float64)
        result["etas"] = etas.tolist()
        result["bounds"] = (C * thetas[:, None] ** beta / etas[None, :] ** alpha).tolist()
    return result


def poisson_test_paths(rate: float, horizon: float, count: int, seed: int = 0) -> List[RealCadlagPath]:
    """Counting processes with unit jumps at the given rate"""
    if rate <= 0:
        raise ConfigurationError(f"Rate must be positive, got {rate}")
    paths = []
    for i in range(count):
        rng = stream_rng(seed, 7, i)
        jumps = int(rng.poisson(rate * horizon))
        times = np.sort(horizon - rng.uniform(0.0, horizon, size=jumps))
        paths.append(RealCadlagPath.with_jumps(horizon, [(float(t), 1.0) for t in times]))
    return paths
