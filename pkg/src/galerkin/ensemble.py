"""Seeded Monte Carlo families of Galerkin paths"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..utils.errors import InsufficientData, IntegrationFailure
from .config import GalerkinConfig
from .path import CadlagPath
from .solver import simulate_path

logger = logging.getLogger("sns_levy.galerkin.ensemble")


@dataclass
class PathFailure:
    seed: int
    message: str
    last_good_time: float

    def to_dict(self) -> Dict[str, Any]:
        return {"seed": self.seed, "message": self.message, "last_good_time": self.last_good_time}


@dataclass
class Ensemble:
    """Successful paths in seed order plus the seeds that failed"""

    n: int
    base_seed: int
    requested: int
    paths: List[CadlagPath] = field(default_factory=list)
    failures: List[PathFailure] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.paths)

    @property
    def seeds(self) -> List[int]:
        return [p.seed for p in self.paths]

    @property
    def horizon(self) -> float:
        self.require_paths()
        return self.paths[0].horizon

    def require_paths(self) -> None:
        if not self.paths:
            raise InsufficientData(f"Ensemble at level n={self.n} holds no successful paths")

    def stop_statistics(self) -> Dict[str, Any]:
        """Fraction of paths stopped before T and the mean and min stopping time among them"""
        stops = [p.stopped_at for p in self.paths if p.stopped]
        return {
            "paths": self.size,
            "stopped": len(stops),
            "fraction_stopped": len(stops) / self.size if self.size else 0.0,
            "mean_tau": float(np.mean(stops)) if stops else None,
            "min_tau": float(np.min(stops)) if stops else None,
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "base_seed": self.base_seed,
            "requested": self.requested,
            "succeeded": self.size,
            "failed": len(self.failures),
            "failures": [f.to_dict() for f in self.failures],
            "stop_statistics": self.stop_statistics(),
        }


def _run_seed(cfg: GalerkinConfig, seed: int) -> Tuple[int, Optional[CadlagPath], Optional[PathFailure]]:
    try:
        return seed, simulate_path(cfg.with_seed(seed)), None
    except IntegrationFailure as e:
        return seed, None, PathFailure(seed, str(e), e.last_good_time)


def simulate_ensemble(cfg: GalerkinConfig, M: int, base_seed: int = 0, workers: int = 1) -> Ensemble:
    """Simulate M independent paths with seeds base_seed + i

    Args:
        cfg: Configuration shared by every path (its own seed is ignored)
        M: Number of paths
        base_seed: Seed of the first path
        workers: Process count; 1 runs in the calling process

    Returns:
        Ensemble in seed order, whatever the worker count
    """
    if M < 1:
        raise InsufficientData(f"An ensemble needs at least one path, got M={M}")
    seeds = [base_seed + i for i in range(M)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_run_seed, [cfg] * M, seeds))
    else:
        results = [_run_seed(cfg, seed) for seed in seeds]

    ensemble = Ensemble(n=cfg.n, base_seed=base_seed, requested=M)
    for seed, path, failure in results:
        if failure is not None:
            logger.warning(f"Path seed={seed} at n={cfg.n} failed: {failure.message}")
            ensemble.failures.append(failure)
        else:
            path.config = cfg.with_seed(seed)
            ensemble.paths.append(path)
    logger.info(f"Ensemble n={cfg.n}: {ensemble.size}/{M} paths, {len(ensemble.failures)} failures")
    return ensemble
