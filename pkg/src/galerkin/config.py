"""Configuration of one Galerkin run: level, horizon, data, noise, stopping radius"""

import csv
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional

import numpy as np

from ..noise.coefficients import NoiseCoefficients, NoNoise
from ..noise.poisson import JumpStream
from ..operators.truncation import CutoffSpec
from ..spectral.basis import BasisTable
from ..utils.errors import ConfigurationError, IngestionError

logger = logging.getLogger("sns_levy.galerkin.config")


@dataclass(frozen=True)
class ForcingTable:
    """Piecewise-constant forcing f(t) with V'-coefficients per mode

    Row k of ``values`` holds the dual coefficients on [times[k], times[k+1]).
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        if len(times) == 0 or times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise ConfigurationError("Forcing breakpoints must start at 0 and increase strictly")
        if values.shape[0] != len(times):
            raise ConfigurationError("One coefficient row per forcing breakpoint is required")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, coeffs) -> "ForcingTable":
        return cls(np.array([0.0]), np.atleast_2d(coeffs))

    @classmethod
    def from_csv(cls, path: str, size: int) -> "ForcingTable":
        """Rows (time, mode index starting at 1, dual coefficient)"""
        rows: Dict[float, Dict[int, float]] = {}
        try:
            with open(path, "r", encoding="utf-8", newline="") as handle:
                for record in csv.DictReader(handle):
                    t, index, value = float(record["time"]), int(record["mode"]), float(record["coefficient"])
                    if not 1 <= index <= size:
                        raise IngestionError(f"Forcing mode index {index} outside [1, {size}]")
                    rows.setdefault(t, {})[index] = value
        except (OSError, KeyError, ValueError) as e:
            raise IngestionError(f"Cannot read forcing table {path}: {e}")
        if 0.0 not in rows:
            rows[0.0] = {}
        times = np.array(sorted(rows))
        values = np.zeros((len(times), size))
        for k, t in enumerate(times):
            for index, value in rows[t].items():
                values[k, index - 1] = value
        return cls(times, values)

    def value(self, t: float, n: int) -> np.ndarray:
        """P_n f(t), right-continuous in t"""
        row = self.values[int(np.searchsorted(self.times, t, side="right")) - 1]
        out = np.zeros(n)
        m = min(n, len(row))
        out[:m] = row[:m]
        return out

    def scaled(self, factor: float) -> "ForcingTable":
        return ForcingTable(self.times, self.values * factor)

    def l2_vprime_norm(self, horizon: float, eigenvalues: Optional[np.ndarray] = None) -> float:
        """||f||_{L^2(0, T; V')}"""
        edges = np.append(np.minimum(self.times, horizon), horizon)
        durations = np.diff(edges)
        width = self.values.shape[1]
        if eigenvalues is None:
            weights = np.ones(width)
        else:
            weights = 1.0 / (1.0 + np.asarray(eigenvalues, dtype=np.float64)[:width])
        per_row = np.sum(self.values ** 2 * weights[None, :], axis=1)
        return float(np.sqrt(np.dot(durations, per_row)))


def initial_field(basis: BasisTable, n: int, preset: str = "mode", params: Optional[Dict[str, Any]] = None) -> np.ndarray:
    """Initial coefficients on span(e_1..e_n)

    Presets: ``zero``; ``mode`` (index starting at 1, amplitude); ``random``
    (seed, scale, decay of the spectrum); ``coefficients`` (explicit list).
    """
    params = params or {}
    a0 = np.zeros(n)
    if preset == "zero":
        return a0
    if preset == "mode":
        index = int(params.get("index", 1))
        if not 1 <= index <= n:
            raise ConfigurationError(f"Initial mode index {index} outside [1, {n}]")
        a0[index - 1] = float(params.get("amplitude", 1.0))
        return a0
    if preset == "random":
        rng = np.random.default_rng(np.random.SeedSequence([int(params.get("seed", 0)), 31]))
        decay = float(params.get("decay", 1.0))
        raw = rng.standard_normal(n) / (1.0 + basis.eigenvalues[:n]) ** decay
        norm = np.linalg.norm(raw)
        return raw * (float(params.get("scale", 1.0)) / norm) if norm > 0 else raw
    if preset == "coefficients":
        values = np.asarray(params.get("values", []), dtype=np.float64)
        a0[:min(n, len(values))] = values[:n]
        return a0
    raise ConfigurationError(f"Unknown initial condition preset '{preset}'")


@dataclass
class GalerkinConfig:
    """Everything one path needs

    Attributes:
        basis: Shared basis table
        n: Galerkin level (number of retained modes)
        T: Horizon
        dt: Base step of the time grid
        u0: Initial coefficients (projected onto the first n modes)
        noise: Jump and Wiener coefficients bound to level n
        forcing: Piecewise-constant forcing, none for f = 0
        R_stop: Stopping radius in H, inf for no stopping
        seed: Seed of the jump, Wiener and bridge streams
        include_stokes: Apply the Stokes semigroup
        include_convection: Apply the truncated nonlinearity B_n
        cutoff: Truncation of the nonlinearity, level n by default
        jumps: Fixed jump realisation overriding the sampled one
        bridge_depth: Dyadic depth of within-step Wiener bridges
    """

    basis: BasisTable
    n: int
    T: float
    dt: float
    u0: np.ndarray
    noise: Optional[NoiseCoefficients] = None
    forcing: Optional[ForcingTable] = None
    R_stop: float = np.inf
    seed: int = 0
    include_stokes: bool = True
    include_convection: bool = True
    cutoff: Optional[CutoffSpec] = None
    jumps: Optional[JumpStream] = None
    bridge_depth: int = 8
    label: str = ""
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.n <= self.basis.size:
            raise ConfigurationError(f"Galerkin level n={self.n} outside [1, {self.basis.size}]")
        if self.T <= 0 or self.dt <= 0:
            raise ConfigurationError(f"Need T > 0 and dt > 0, got T={self.T}, dt={self.dt}")
        u0 = np.asarray(self.u0, dtype=np.float64)
        if not np.all(np.isfinite(u0)):
            raise ConfigurationError("Initial field must have a finite H norm")
        projected = np.zeros(self.n)
        projected[:min(self.n, len(u0))] = u0[:self.n]
        self.u0 = projected
        if self.noise is None:
            self.noise = NoNoise(self.basis, self.n)
        if self.noise.n != self.n:
            raise ConfigurationError(f"Noise is bound to level {self.noise.n}, config has level {self.n}")
        if self.cutoff is None:
            self.cutoff = CutoffSpec(level=self.n)
        if self.R_stop < 0:
            raise ConfigurationError("Stopping radius must be nonnegative")

    def with_seed(self, seed: int) -> "GalerkinConfig":
        return replace(self, seed=seed, u0=np.array(self.u0))

    @property
    def decay_rates(self) -> np.ndarray:
        """Per-mode rates of the linear semigroup, zero when the Stokes part is off"""
        if not self.include_stokes:
            return np.zeros(self.n)
        return np.array(self.basis.eigenvalues[:self.n])
