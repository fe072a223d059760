"""Monte Carlo moments E[sup_t |u_n(t)|_H^p] and E[int ||u_n||_V^2 dt] with bootstrap intervals"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy import stats

from ..galerkin.ensemble import Ensemble
from ..galerkin.path import CadlagPath
from ..utils.errors import ConfigurationError, InsufficientData

logger = logging.getLogger("sns_levy.estimates.moments")


@dataclass
class MomentEstimate:
    mean: float
    ci_low: float
    ci_high: float

    def to_dict(self) -> Dict[str, float]:
        return {"mean": self.mean, "ci_low": self.ci_low, "ci_high": self.ci_high}


@dataclass
class MomentReport:
    """Moment estimates of one Galerkin level"""

    n: int
    paths: int
    seeds: List[int]
    confidence: float
    sup_moments: Dict[float, MomentEstimate] = field(default_factory=dict)
    v_integral: Optional[MomentEstimate] = None

    def statistic(self, key: Union[float, str]) -> MomentEstimate:
        """``"v_integral"`` or a moment order p"""
        if key == "v_integral":
            return self.v_integral
        return self.sup_moments[float(key)]

    def lyapunov_ordered(self, slack: float = 1e-12) -> bool:
        """E[X^p]^(1/p) nondecreasing in p"""
        orders = sorted(self.sup_moments)
        roots = [self.sup_moments[p].mean ** (1.0 / p) for p in orders]
        return all(a <= b * (1.0 + slack) + slack for a, b in zip(roots[:-1], roots[1:]))

    def rows(self) -> List[Dict[str, Any]]:
        out = [{"n": self.n, "statistic": f"sup_h^{p:g}", **estimate.to_dict()}
               for p, estimate in sorted(self.sup_moments.items())]
        if self.v_integral is not None:
            out.append({"n": self.n, "statistic": "int_v_sq", **self.v_integral.to_dict()})
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "paths": self.paths,
            "seeds": self.seeds,
            "confidence": self.confidence,
            "sup_moments": {f"{p:g}": e.to_dict() for p, e in sorted(self.sup_moments.items())},
            "v_integral": self.v_integral.to_dict() if self.v_integral is not None else None,
        }


def bootstrap_mean(samples: np.ndarray, confidence: float = 0.95, resamples: int = 999,
                   seed: int = 0) -> MomentEstimate:
    """Sample mean with a percentile bootstrap interval; degenerate samples get a zero-width interval"""
    samples = np.asarray(samples, dtype=np.float64)
    mean = float(np.mean(samples))
    if len(samples) < 2 or np.all(samples == samples[0]):
        return MomentEstimate(mean, mean, mean)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 41]))
    result = stats.bootstrap((samples,), np.mean, confidence_level=confidence, n_resamples=resamples,
                             method="percentile", random_state=rng)
    return MomentEstimate(mean, float(result.confidence_interval.low), float(result.confidence_interval.high))


def _paths(source: Union[Ensemble, Sequence[CadlagPath]]) -> List[CadlagPath]:
    paths = list(source.paths) if isinstance(source, Ensemble) else list(source)
    if not paths:
        raise InsufficientData("Moment estimates need a nonempty ensemble")
    return paths


def _max_order(paths: List[CadlagPath], gamma: Optional[float]) -> float:
    if gamma is None:
        config = paths[0].config
        gamma = config.noise.gamma if config is not None else None
    return float("inf") if gamma is None else 4.0 + gamma


def moment_estimates(source: Union[Ensemble, Sequence[CadlagPath]], p_list: Sequence[float],
                     gamma: Optional[float] = None, confidence: float = 0.95, resamples: int = 999,
                     seed: int = 0) -> MomentReport:
    """Estimate E[sup_t |u(t)|_H^p] for every p and E[int_0^T ||u||_V^2 dt]

    Args:
        source: Ensemble or paths of one level
        p_list: Moment orders in [1, 4 + gamma]
        gamma: Integrability excess; read from the paths' noise when omitted
        confidence: Bootstrap confidence level
        resamples: Bootstrap resamples
        seed: Bootstrap seed

    Returns:
        MomentReport of the level

    Raises:
        InsufficientData: empty ensemble or a non-finite sample
    """
    paths = _paths(source)
    top = _max_order(paths, gamma)
    for p in p_list:
        if not 1.0 <= p <= top:
            raise ConfigurationError(f"Moment order p={p} outside [1, {top:g}]")

    sup_norms = np.array([p.sup_h_norm() for p in paths])
    v_integrals = np.array([p.v_norm_sq_integral() for p in paths])
    if not (np.all(np.isfinite(sup_norms)) and np.all(np.isfinite(v_integrals))):
        raise InsufficientData("Non-finite path statistic; the ensemble contains a failed integration")

    report = MomentReport(n=paths[0].n, paths=len(paths), seeds=[p.seed for p in paths], confidence=confidence)
    for p in p_list:
        report.sup_moments[float(p)] = bootstrap_mean(sup_norms ** p, confidence, resamples, seed)
    report.v_integral = bootstrap_mean(v_integrals, confidence, resamples, seed)
    logger.debug(f"Moments n={report.n}: " + ", ".join(
        f"p={p:g}: {e.mean:.4g}" for p, e in sorted(report.sup_moments.items())))
    return report
