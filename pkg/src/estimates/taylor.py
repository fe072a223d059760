"""Audit of | |x+h|^p - |x|^p - p|x|^(p-2)<x, h> | <= c_p (|x|^(p-2) + |h|^(p-2)) |h|^2"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np

from ..operators.audit import fit_and_validate
from ..utils.errors import ConfigurationError

logger = logging.getLogger("sns_levy.estimates.taylor")


def taylor_ratio(x: np.ndarray, h: np.ndarray, p: float) -> Optional[float]:
    """Left side over the bracket on the right; None for h = 0"""
    h_norm = float(np.linalg.norm(h))
    if h_norm == 0.0:
        return None
    x_norm = float(np.linalg.norm(x))
    lhs = abs(np.linalg.norm(x + h) ** p - x_norm ** p - p * x_norm ** (p - 2) * float(np.dot(x, h)))
    return lhs / ((x_norm ** (p - 2) + h_norm ** (p - 2)) * h_norm ** 2)


def _sampler(p: float, dimension: int):
    def sample(size: int, rng: np.random.Generator) -> List[float]:
        ratios = []
        for _ in range(size):
            # directions on the sphere, norms spread over four decades
            x = rng.standard_normal(dimension) * 10.0 ** rng.uniform(-2, 2)
            h = rng.standard_normal(dimension) * 10.0 ** rng.uniform(-2, 2)
            ratio = taylor_ratio(x, h, p)
            if ratio is not None:
                ratios.append(ratio)
        return ratios
    return sample


def taylor_inequality_audit(p: float, samples: int = 100_000, dimension: int = 8, seed: int = 0) -> Dict[str, Any]:
    """Fit c_p on random pairs in R^dimension and validate it on a fresh sample

    Args:
        p: Exponent, >= 2
        samples: Pairs in the fitting sample and in the validation sample
        dimension: Dimension of the Galerkin space
        seed: Seed of both samples

    Returns:
        Dictionary with the fitted constant, violation count and refit flag
    """
    if p < 2:
        raise ConfigurationError(f"The Taylor inequality needs p >= 2, got {p}")
    result = fit_and_validate(_sampler(p, dimension), samples, seed)
    result["p"] = p
    result["dimension"] = dimension
    logger.info(f"Taylor audit p={p:g}: c_p = {result['constant']:.6g}, "
                f"{result['violations']}/{result['samples']} violations")
    return result
