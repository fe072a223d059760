"""Tightness diagnostics for an ensemble of Galerkin paths

(a) sup over paths of sup_t |u(t)|_H, (b) sup over paths of int ||u||_V^q dt,
(c) the (1 - eps)-quantile over paths of the modulus w(u, delta) in U', read
as a curve in delta. The verdict asks (a) and (b) to be finite (and under
optional bounds) and (c) at the smallest delta to fall below a fraction of
the quantile path diameter.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from ..galerkin.ensemble import Ensemble
from ..galerkin.path import CadlagPath
from ..utils.errors import InsufficientData
from .aldous import AldousTable
from .modulus import ModulusCurve, modulus_curve
from .paths import StatePath, as_state_path

logger = logging.getLogger("sns_levy.analysis.tightness")

DEFAULT_DIAMETER_FRACTION = 0.1


@dataclass
class TightnessReport:
    """Statistics and verdict flags of the three tightness conditions"""

    n: int
    paths: int
    q: float
    eps: float
    sup_h_norm: float
    lq_v_bound: float
    modulus_curve: ModulusCurve
    diameter: float
    threshold: float
    condition_a: bool
    condition_b: bool
    condition_c: bool
    aldous: Optional[AldousTable] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return self.condition_a and self.condition_b and self.condition_c

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "paths": self.paths,
            "q": self.q,
            "eps": self.eps,
            "sup_h_norm": self.sup_h_norm,
            "lq_v_bound": self.lq_v_bound,
            "modulus_curve": self.modulus_curve.to_dict(),
            "curve_monotone": self.modulus_curve.is_monotone,
            "diameter": self.diameter,
            "threshold": self.threshold,
            "condition_a": self.condition_a,
            "condition_b": self.condition_b,
            "condition_c": self.condition_c,
            "verdict": self.verdict,
            "aldous": self.aldous.to_dict() if self.aldous is not None else None,
            **self.details,
        }


def _paths(source: Union[Ensemble, Sequence[CadlagPath]]) -> List[CadlagPath]:
    paths = list(source.paths) if isinstance(source, Ensemble) else list(source)
    if not paths:
        raise InsufficientData("Tightness diagnostics need a nonempty ensemble")
    return paths


def compactness_statistics(paths: Sequence[Union[StatePath, CadlagPath]], deltas: Sequence[float],
                           space: str = "Uprime", refine: int = 0) -> Dict[str, Any]:
    """Uniform bound sup_u sup_t |u(t)| and sup_u w(u, delta) per delta for a set of paths"""
    if not paths:
        raise InsufficientData("Compactness statistics need at least one path")
    states = [as_state_path(p, space) for p in paths]
    uniform = max(float(np.max(np.linalg.norm(s.points, axis=1))) for s in states)
    curves = np.array([modulus_curve(s, deltas, refine).values for s in states])
    curve = ModulusCurve(np.asarray(deltas, dtype=np.float64), np.max(curves, axis=0))
    return {"uniform_bound": uniform, "modulus_sup": curve.to_dict()}


def tightness_report(source: Union[Ensemble, Sequence[CadlagPath]], q: float, deltas: Sequence[float], eps: float,
                     sup_bound: Optional[float] = None, lq_bound: Optional[float] = None,
                     diameter_fraction: float = DEFAULT_DIAMETER_FRACTION, refine: int = 0,
                     aldous: Optional[AldousTable] = None) -> TightnessReport:
    """Evaluate the three tightness conditions on an ensemble

    Args:
        source: Ensemble or list of paths
        q: Exponent of the L^q(0, T; V) statistic
        deltas: Modulus grid
        eps: Quantile level; condition (c) uses the (1 - eps)-quantile over paths
        sup_bound: Optional bound for condition (a)
        lq_bound: Optional bound for condition (b)
        diameter_fraction: Share of the quantile U' diameter that (c) must fall under
        refine: Uniform refinement of modulus candidates
        aldous: Aldous table to attach

    Returns:
        Report with the statistics and verdict flags
    """
    paths = _paths(source)
    sup_norms = np.array([p.sup_h_norm() for p in paths])
    lq = np.array([p.lq_v_integral(q) for p in paths])
    states = [as_state_path(p, "Uprime") for p in paths]
    curves = np.array([modulus_curve(s, deltas, refine).values for s in states])
    quantile_curve = ModulusCurve(np.asarray(deltas, dtype=np.float64), np.quantile(curves, 1.0 - eps, axis=0))
    diameter = float(np.quantile([s.diameter() for s in states], 1.0 - eps))
    threshold = diameter_fraction * diameter

    sup_h = float(np.max(sup_norms))
    lq_max = float(np.max(lq))
    condition_a = bool(np.isfinite(sup_h) and (sup_bound is None or sup_h <= sup_bound))
    condition_b = bool(np.isfinite(lq_max) and (lq_bound is None or lq_max <= lq_bound))
    condition_c = bool(quantile_curve.smallest_delta_value <= threshold)
    report = TightnessReport(
        n=paths[0].n, paths=len(paths), q=q, eps=eps, sup_h_norm=sup_h, lq_v_bound=lq_max,
        modulus_curve=quantile_curve, diameter=diameter, threshold=threshold,
        condition_a=condition_a, condition_b=condition_b, condition_c=condition_c, aldous=aldous,
        details={"sup_h_norm_quantile": float(np.quantile(sup_norms, 1.0 - eps)),
                 "lq_v_quantile": float(np.quantile(lq, 1.0 - eps))},
    )
    logger.info(f"Tightness n={report.n}: a={condition_a} b={condition_b} c={condition_c} "
                f"(w={quantile_curve.smallest_delta_value:.4g} vs {threshold:.4g})")
    return report
