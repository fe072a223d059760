"""Uniformity of moment estimates across Galerkin levels"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy import stats

from ..galerkin.config import GalerkinConfig
from ..galerkin.ensemble import simulate_ensemble
from ..utils.errors import InsufficientData
from .moments import MomentReport, moment_estimates

logger = logging.getLogger("sns_levy.estimates.scan")

MAX_LEVEL_RATIO = 2.0


@dataclass
class StatisticTrend:
    """Growth of one statistic across levels"""

    statistic: str
    levels: List[int]
    means: List[float]
    slope: float
    slope_ci: List[float]
    ratios: List[float]
    trend_ok: bool
    ratio_ok: bool

    @property
    def passed(self) -> bool:
        return self.trend_ok and self.ratio_ok

    def to_dict(self) -> Dict[str, Any]:
        return {"statistic": self.statistic, "levels": self.levels, "means": self.means, "slope": self.slope,
                "slope_ci": self.slope_ci, "ratios": self.ratios, "trend_ok": self.trend_ok,
                "ratio_ok": self.ratio_ok, "passed": self.passed}


@dataclass
class ScanResult:
    levels: List[int]
    trends: List[StatisticTrend] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return all(t.passed for t in self.trends)

    def to_dict(self) -> Dict[str, Any]:
        return {"levels": self.levels, "verdict": self.verdict, "trends": [t.to_dict() for t in self.trends]}


def _trend(name: str, levels: List[int], estimates, confidence: float) -> StatisticTrend:
    means = np.array([e.mean for e in estimates])
    slope, ci = 0.0, [0.0, 0.0]
    trend_ok = True
    if np.all(means > 0):
        fit = stats.linregress(np.log(levels), np.log(means))
        half = stats.t.ppf(0.5 + confidence / 2.0, len(levels) - 2) * fit.stderr
        slope, ci = float(fit.slope), [float(fit.slope - half), float(fit.slope + half)]
        # growth is significant only if the whole interval is positive
        trend_ok = ci[0] <= 0.0

    ratios = []
    for previous, current in zip(estimates[:-1], estimates[1:]):
        if previous.ci_high > 0:
            ratios.append(float(current.ci_low / previous.ci_high))
        else:
            ratios.append(1.0 if current.ci_low <= 0 else float("inf"))
    ratio_ok = all(r <= MAX_LEVEL_RATIO for r in ratios)
    return StatisticTrend(name, levels, means.tolist(), slope, ci, ratios, bool(trend_ok), bool(ratio_ok))


def constant_scan(reports: Sequence[MomentReport], statistics: Optional[Sequence[Union[float, str]]] = None,
                  confidence: float = 0.95) -> ScanResult:
    """Verdict on whether moment estimates stay bounded uniformly in n

    A statistic passes when the log-log slope against n has a confidence
    interval reaching 0 or below, and when each doubling-level ratio
    (lower CI of the finer level over upper CI of the coarser) is at most 2.

    Args:
        reports: One MomentReport per level
        statistics: Moment orders and/or ``"v_integral"``; all of them by default
        confidence: Level of the slope interval

    Raises:
        InsufficientData: fewer than three levels
    """
    ordered = sorted(reports, key=lambda r: r.n)
    if len(ordered) < 3:
        raise InsufficientData(f"A level scan needs at least 3 levels, got {len(ordered)}")
    levels = [r.n for r in ordered]
    if statistics is None:
        statistics = sorted(ordered[0].sup_moments) + ["v_integral"]

    result = ScanResult(levels)
    for key in statistics:
        name = "int_v_sq" if key == "v_integral" else f"sup_h^{float(key):g}"
        result.trends.append(_trend(name, levels, [r.statistic(key) for r in ordered], confidence))
    logger.info(f"Level scan over n={levels}: verdict {'pass' if result.verdict else 'fail'}")
    return result


def run_level_scan(make_config: Callable[[int], GalerkinConfig], levels: Sequence[int], M: int,
                   p_list: Sequence[float], base_seed: int = 0, workers: int = 1,
                   confidence: float = 0.95) -> Dict[str, Any]:
    """Simulate one ensemble per level, estimate moments and scan them"""
    reports = []
    for n in levels:
        ensemble = simulate_ensemble(make_config(n), M, base_seed, workers)
        reports.append(moment_estimates(ensemble, p_list, confidence=confidence, seed=base_seed))
    return {"reports": reports, "scan": constant_scan(reports, confidence=confidence)}
