"""Discrete energy (p = 2 Ito) balance of a recorded path

Between consecutive records k and k+1 the continuous defect is

    |u(s_{k+1}-)|^2 - |u_k|^2 - ds (-2||u_k||^2 + 2<f, u_k> + ||G(u_k)||_HS^2)
        - 2<u_k, dM_G> + 2 ds <u_k, int F(u_k; y) nu(dy)>,

with dM_G read from the Wiener ledger. Each jump adds the defect
(|u(t_j)|^2 - |u(t_j-)|^2) - (|u(t_j-) + F|^2 - |u(t_j-)|^2), which vanishes
up to rounding.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from ..galerkin.config import GalerkinConfig
from ..galerkin.path import CadlagPath
from ..galerkin.solver import GalerkinSolver
from ..utils.errors import ConfigurationError

logger = logging.getLogger("sns_levy.estimates.energy")


@dataclass
class EnergyBalance:
    """Per-interval and per-jump defects of the discrete energy identity"""

    times: np.ndarray
    continuous: np.ndarray
    jump_times: np.ndarray
    jumps: np.ndarray

    @property
    def max_continuous(self) -> float:
        return float(np.max(np.abs(self.continuous))) if len(self.continuous) else 0.0

    @property
    def max_jump(self) -> float:
        return float(np.max(np.abs(self.jumps))) if len(self.jumps) else 0.0

    @property
    def total(self) -> float:
        """Defect of |u(end)|^2 - |u0|^2 against all accumulated terms"""
        return float(np.sum(self.continuous) + np.sum(self.jumps))

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.continuous)

    def to_dict(self) -> Dict[str, Any]:
        return {"max_continuous": self.max_continuous, "max_jump": self.max_jump, "total": self.total,
                "intervals": len(self.continuous), "jumps": len(self.jumps)}


def energy_balance(path: CadlagPath, cfg: Optional[GalerkinConfig] = None) -> EnergyBalance:
    """Defects of the p = 2 energy identity along the path

    Args:
        path: Simulated path
        cfg: Configuration the path was simulated with; the attached one by default

    Returns:
        EnergyBalance with one continuous defect per record interval and one defect per jump
    """
    cfg = cfg or path.config
    if cfg is None:
        raise ConfigurationError("Path carries no configuration to evaluate the energy terms with")
    solver = GalerkinSolver(cfg)
    noise = cfg.noise
    dissipation = path.basis.eigenvalues[:path.n] if cfg.include_stokes else np.zeros(path.n)

    starts, continuous, jump_times, jumps = [], [], [], []
    for k in range(path.record_count - 1):
        x = path.states[k]
        ds = path.times[k + 1] - path.times[k]
        is_jump = bool(np.isfinite(path.marks[k + 1, 0]))
        if ds == 0.0 and not is_jump:
            # grid record repeating a jump record at the same time
            continue
        left = path.left[k + 1]
        rate = -2.0 * float(np.sum(dissipation * x * x)) + 2.0 * float(np.dot(solver.forcing(path.times[k]), x))
        if noise.has_wiener:
            rate += noise.hs_norm_sq(path.times[k], x)
        martingale = float(np.dot(x, path.ledger_wiener[k + 1] - path.ledger_wiener[k]))
        compensation = float(np.dot(x, solver.compensator(path.times[k], x)))
        defect = (float(np.dot(left, left)) - float(np.dot(x, x))) - ds * rate - 2.0 * martingale \
            + 2.0 * ds * compensation
        starts.append(path.times[k])
        continuous.append(defect)

        if is_jump:
            after = path.states[k + 1]
            size = noise.jump(path.times[k + 1], left, path.marks[k + 1])
            moved = left + size
            jumps.append((float(np.dot(after, after)) - float(np.dot(left, left)))
                         - (float(np.dot(moved, moved)) - float(np.dot(left, left))))
            jump_times.append(path.times[k + 1])

    balance = EnergyBalance(np.array(starts), np.array(continuous), np.array(jump_times), np.array(jumps))
    logger.debug(f"Energy balance seed={path.seed}: max continuous {balance.max_continuous:.3e}, "
                 f"max jump {balance.max_jump:.3e}")
    return balance
