"""Jump-adapted exponential Euler-Maruyama integration of the Galerkin system

Within a grid step [t, t + h] the coefficients are frozen at the grid state
a_t and, for t < s <= t + h,

    a(s) = e^(-A (s - t)) a_t + (s - t) r + G(a_t) W_t(s) + S(s),
    r = -B_n(a_t) + P_n f(t) - int P_n F(t, a_t; y) nu(dy),

where W_t is the Wiener path restarted at t and S(s) sums the jumps
P_n F(t_j, a(t_j-); y_j) with t_j <= s. The jump sum is added last, so
zero-size jumps leave every state unchanged.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..noise.poisson import JumpStream, sample_jumps
from ..noise.wiener import BrownianBridge, WienerConfig, time_grid, wiener_increments
from ..operators.forms import dealiased_grid
from ..operators.truncation import truncated_coeffs
from ..spectral.field import SpectralField
from ..utils.errors import ConfigurationError, IntegrationFailure
from .config import GalerkinConfig
from .path import CadlagPath, GRID, JUMP, STOP

logger = logging.getLogger("sns_levy.galerkin.solver")


@dataclass
class StepEvent:
    """One record produced inside a grid step, ledgers relative to the step start"""

    time: float
    kind: int
    mark: Optional[np.ndarray]
    state: np.ndarray
    left: np.ndarray
    jump_increment: np.ndarray
    wiener_increment: np.ndarray


class GalerkinSolver:
    """Integrator of one configuration"""

    def __init__(self, cfg: GalerkinConfig):
        """Initialize the solver

        Args:
            cfg: Galerkin configuration (level, data, noise, stopping radius)
        """
        self.cfg = cfg
        self.basis = cfg.basis
        self.n = cfg.n
        self.noise = cfg.noise
        self.rates = cfg.decay_rates
        self.grid = dealiased_grid(cfg.basis) if cfg.include_convection else None
        self.mark_dim = cfg.noise.marks.mark_dim if cfg.noise.marks is not None else 1

    # frozen coefficients

    def convection(self, a: np.ndarray) -> np.ndarray:
        if self.grid is None:
            return np.zeros(self.n)
        return truncated_coeffs(self.basis, self.grid, a, self.cfg.cutoff)

    def forcing(self, t: float) -> np.ndarray:
        if self.cfg.forcing is None:
            return np.zeros(self.n)
        return self.cfg.forcing.value(t, self.n)

    def compensator(self, t: float, a: np.ndarray) -> np.ndarray:
        if not self.noise.has_jumps:
            return np.zeros(self.n)
        return self.noise.compensator(t, a)

    def diffusion(self, t: float, a: np.ndarray) -> Optional[np.ndarray]:
        if not self.noise.has_wiener:
            return None
        return self.noise.diffusion(t, a)

    def semigroup(self, offset: float) -> np.ndarray:
        return np.exp(-self.rates * offset)

    # integration

    def step(self, a: np.ndarray, t: float, h: float, dW: Optional[np.ndarray] = None,
             jump_times: Sequence[float] = (), jump_marks: Sequence[np.ndarray] = (),
             wiener_at_jumps: Optional[np.ndarray] = None) -> List[StepEvent]:
        """Advance the grid state a from t to t + h

        Args:
            a: Grid state on span(e_1..e_n)
            t: Step start
            h: Step length
            dW: Wiener increment over the step, shape (K,)
            jump_times: Ordered jump times in (t, t + h]
            jump_marks: Marks of those jumps
            wiener_at_jumps: W_t at the jump times, shape (J, K); linear in time when omitted

        Returns:
            Jump events followed by the grid event at t + h
        """
        a = np.asarray(a, dtype=np.float64)
        comp = self.compensator(t, a)
        drift = (-self.convection(a) + self.forcing(t)) - comp
        g = self.diffusion(t, a)
        if g is not None and dW is None:
            raise ConfigurationError("Wiener noise is configured but no increment was given")

        events: List[StepEvent] = []
        jump_sum = np.zeros(self.n)
        for j, (s, y) in enumerate(zip(jump_times, jump_marks)):
            offset = s - t
            if g is not None:
                w = wiener_at_jumps[j] if wiener_at_jumps is not None else (offset / h) * np.asarray(dW)
                noise_part = g @ w
            else:
                noise_part = np.zeros(self.n)
            base = self.semigroup(offset) * a + offset * drift + noise_part
            left = base + jump_sum
            jump_sum = jump_sum + self.noise.jump(s, left, y)
            events.append(StepEvent(s, JUMP, np.atleast_1d(y), base + jump_sum, left,
                                    jump_sum - offset * comp, noise_part))

        noise_part = g @ np.asarray(dW) if g is not None else np.zeros(self.n)
        base = self.semigroup(h) * a + h * drift + noise_part
        end = t + h
        left = events[-1].left if events and events[-1].time == end else base + jump_sum
        events.append(StepEvent(end, GRID, None, base + jump_sum, left, jump_sum - h * comp, noise_part))
        return events

    def _jump_stream(self) -> Optional[JumpStream]:
        if self.cfg.jumps is not None:
            return self.cfg.jumps
        if not self.noise.has_jumps:
            return None
        return sample_jumps(self.noise.marks, self.cfg.T, self.cfg.seed)

    def simulate(self) -> CadlagPath:
        """Integrate on [0, T] or up to the first exit from the H-ball of radius R_stop"""
        cfg = self.cfg
        grid = time_grid(cfg.T, cfg.dt)
        steps = np.diff(grid)
        jumps = self._jump_stream()
        increments = None
        bridge = None
        if self.noise.has_wiener:
            increments = wiener_increments(WienerConfig(self.noise.wiener_modes, cfg.dt, cfg.T, cfg.seed))
            bridge = BrownianBridge(cfg.seed, depth=cfg.bridge_depth)

        times, kinds, marks = [], [], []
        states, lefts, ledgers_j, ledgers_w = [], [], [], []
        nan_mark = np.full(self.mark_dim, np.nan)

        def record(time, kind, mark, state, left, lj, lw):
            times.append(time)
            kinds.append(kind)
            marks.append(nan_mark if mark is None else mark)
            states.append(state)
            lefts.append(left)
            ledgers_j.append(lj)
            ledgers_w.append(lw)

        a = np.array(cfg.u0)
        zero = np.zeros(self.n)
        record(0.0, GRID, None, a, a, zero, zero)
        stopped_at = None
        if np.linalg.norm(a) >= cfg.R_stop:
            kinds[-1] |= STOP
            stopped_at = 0.0

        last_good = 0.0
        for k, h in enumerate(steps):
            if stopped_at is not None:
                break
            t = grid[k]
            if jumps is not None:
                jt, jm = jumps.events_in(t, grid[k + 1])
            else:
                jt, jm = np.empty(0), np.empty((0, self.mark_dim))
            dW = increments[k] if increments is not None else None
            w_at = None
            if bridge is not None and len(jt):
                w_at = bridge.values(k, dW, h, jt - t)
                bridge.release(k)

            base_j, base_w = ledgers_j[-1], ledgers_w[-1]
            for event in self.step(a, t, h, dW, jt, jm, w_at):
                if not np.all(np.isfinite(event.state)):
                    raise IntegrationFailure(f"Non-finite state at t={event.time:.6g}", last_good)
                record(event.time, event.kind, event.mark, event.state, event.left,
                       base_j + event.jump_increment, base_w + event.wiener_increment)
                last_good = event.time
                if np.linalg.norm(event.state) >= cfg.R_stop:
                    kinds[-1] |= STOP
                    stopped_at = event.time
                    break
            a = states[-1]

        path = CadlagPath(
            basis=self.basis,
            n=self.n,
            horizon=cfg.T,
            times=np.array(times),
            kinds=np.array(kinds, dtype=np.uint8),
            marks=np.array(marks).reshape(len(times), self.mark_dim),
            states=np.array(states),
            left=np.array(lefts),
            ledger_jump=np.array(ledgers_j),
            ledger_wiener=np.array(ledgers_w),
            decay_rates=np.array(self.rates),
            stopped_at=stopped_at,
            seed=cfg.seed,
            config=cfg,
        )
        logger.debug(f"Path seed={cfg.seed} n={self.n}: {path.record_count} records, "
                     f"{path.jump_count} jumps, stopped_at={stopped_at}")
        return path


def step(cfg: GalerkinConfig, state: np.ndarray, t: float, dt: float, dW: Optional[np.ndarray] = None,
         jump_times: Sequence[float] = (), jump_marks: Sequence[np.ndarray] = ()) -> np.ndarray:
    """State at t + dt after one jump-adapted step"""
    return GalerkinSolver(cfg).step(state, t, dt, dW, jump_times, jump_marks)[-1].state


def simulate_path(cfg: GalerkinConfig) -> CadlagPath:
    return GalerkinSolver(cfg).simulate()


def weak_form_defects(path: CadlagPath, cfg: Optional[GalerkinConfig] = None) -> np.ndarray:
    """Per-record defect vectors of the discrete martingale-solution identity

    u(s) - u0 + (Stokes, convection and forcing terms up to s) - ledgers(s),
    with every term recomputed from the recorded grid states. Row k pairs
    with a test function v to give the residual at times[k].
    """
    cfg = cfg or path.config
    if cfg is None:
        raise ConfigurationError("Path carries no configuration to recompute the drift from")
    solver = GalerkinSolver(cfg)
    u0 = path.states[0]
    accumulated = np.zeros(path.n)
    start_time, start_state = path.times[0], u0
    frozen_b, frozen_f = solver.convection(u0), solver.forcing(path.times[0])
    defects = np.zeros((path.record_count, path.n))

    for k in range(path.record_count):
        offset = path.times[k] - start_time
        terms = accumulated + (1.0 - solver.semigroup(offset)) * start_state \
            + offset * frozen_b - offset * frozen_f
        defects[k] = path.states[k] - u0 + terms - path.ledger_jump[k] - path.ledger_wiener[k]
        if k > 0 and path.kinds[k] == GRID:
            accumulated = terms
            start_time, start_state = path.times[k], path.states[k]
            frozen_b, frozen_f = solver.convection(start_state), solver.forcing(start_time)
    return defects


def weak_form_residuals(path: CadlagPath, v, cfg: Optional[GalerkinConfig] = None) -> np.ndarray:
    """Per-record residual |<defect(s), v>| for a test function v in span(e_1..e_n)"""
    coeffs = v.coeffs if isinstance(v, SpectralField) else np.asarray(v, dtype=np.float64)
    if np.any(coeffs[path.n:]):
        raise ConfigurationError(f"Test function must lie in span(e_1..e_{path.n})")
    test = np.zeros(path.n)
    test[:min(path.n, len(coeffs))] = coeffs[:path.n]
    return np.abs(weak_form_defects(path, cfg) @ test)


def weak_form_residual(path: CadlagPath, v=None, cfg: Optional[GalerkinConfig] = None) -> float:
    """Largest residual up to the end of the path; over all test modes e_1..e_n when v is None"""
    if v is None:
        return float(np.max(np.abs(weak_form_defects(path, cfg))))
    return float(np.max(weak_form_residuals(path, v, cfg)))
