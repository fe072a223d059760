"""Event-ordered records of a simulated trajectory"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from ..spectral.basis import BasisTable

# bit flags; a path stopping on a jump record carries JUMP | STOP
GRID, JUMP, STOP = 0, 1, 2
KIND_NAMES = {GRID: "grid", JUMP: "jump", STOP: "stop", JUMP | STOP: "jump+stop"}


def interpolant_weights(rates: np.ndarray, duration: float) -> np.ndarray:
    """int_0^h e^(-2 rate s) ds per mode, equal to h for a zero rate"""
    rates = np.asarray(rates, dtype=np.float64)
    safe = np.where(rates > 0, rates, 1.0)
    return np.where(rates > 0, -np.expm1(-2.0 * safe * duration) / (2.0 * safe), duration)


@dataclass
class CadlagPath:
    """Right-continuous record of one Galerkin trajectory

    Record k holds the post-event state at ``times[k]``, its left limit and
    the cumulative stochastic-integral ledgers (compensated jumps, Wiener).
    Between records the path is read as constant; after a stop it stays at
    the stop state.
    """

    basis: BasisTable = field(repr=False)
    n: int
    horizon: float
    times: np.ndarray = field(repr=False)
    kinds: np.ndarray = field(repr=False)
    marks: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)
    ledger_jump: np.ndarray = field(repr=False)
    ledger_wiener: np.ndarray = field(repr=False)
    decay_rates: np.ndarray = field(repr=False)
    stopped_at: Optional[float] = None
    seed: int = 0
    config: Any = field(default=None, repr=False, compare=False)

    @property
    def record_count(self) -> int:
        return len(self.times)

    @property
    def end_time(self) -> float:
        return self.stopped_at if self.stopped_at is not None else self.horizon

    @property
    def stopped(self) -> bool:
        return self.stopped_at is not None

    @property
    def jump_count(self) -> int:
        return int(np.sum((self.kinds & JUMP) != 0))

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def grid_mask(self) -> np.ndarray:
        return self.kinds == GRID

    def durations(self) -> np.ndarray:
        """Length of the interval on which each record is the current value, up to end_time"""
        ends = np.append(self.times[1:], max(self.end_time, self.times[-1]))
        return np.maximum(ends - self.times, 0.0)

    def value_at(self, t: float) -> np.ndarray:
        """State at time t (right-continuous; the stop state after tau)"""
        index = int(np.searchsorted(self.times, t, side="right")) - 1
        return self.states[max(index, 0)]

    def values_at(self, ts) -> np.ndarray:
        index = np.searchsorted(self.times, np.asarray(ts, dtype=np.float64), side="right") - 1
        return self.states[np.maximum(index, 0)]

    def h_norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)

    def sup_h_norm(self) -> float:
        return float(np.max(self.h_norms()))

    def coefficient_trace(self, index: int) -> np.ndarray:
        return self.states[:, index]

    def dissipation_integral(self) -> float:
        """int_0^end ||u||^2 dt with each mode decaying exponentially across a record interval"""
        eigen = self.basis.eigenvalues[:self.n]
        total = 0.0
        for state, duration in zip(self.states, self.durations()):
            if duration > 0:
                total += float(np.sum(eigen * state * state * interpolant_weights(self.decay_rates, duration)))
        return total

    def v_norm_sq_integral(self) -> float:
        """int_0^end ||u||_V^2 dt with the same exponential interpolant"""
        weights_v = 1.0 + self.basis.eigenvalues[:self.n]
        total = 0.0
        for state, duration in zip(self.states, self.durations()):
            if duration > 0:
                total += float(np.sum(weights_v * state * state * interpolant_weights(self.decay_rates, duration)))
        return total

    def lq_v_integral(self, q: float) -> float:
        """int_0^end ||u||_V^q dt; left-point rule unless q = 2"""
        if q == 2:
            return self.v_norm_sq_integral()
        weights_v = 1.0 + self.basis.eigenvalues[:self.n]
        norms = np.sqrt(np.sum(weights_v[None, :] * self.states ** 2, axis=1))
        return float(np.dot(self.durations(), norms ** q))

    def l2_h_norm(self) -> float:
        """(int_0^end |u|_H^2 dt)^(1/2) of the recorded step function"""
        return float(np.sqrt(np.dot(self.durations(), np.sum(self.states ** 2, axis=1))))

    def summary(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "seed": self.seed,
            "records": self.record_count,
            "jumps": self.jump_count,
            "stopped_at": self.stopped_at,
            "sup_h_norm": self.sup_h_norm(),
            "final_h_norm": float(np.linalg.norm(self.final_state)),
        }
