"""
Pydantic models for experiment configurations and run reports
"""

import os
from typing import Any, Dict, List, Optional

import numpy as np
import yaml
from pydantic import BaseModel, Field, PrivateAttr, ValidationError, field_validator, model_validator

from ..analysis.aldous import StoppingRule
from ..galerkin.config import ForcingTable, GalerkinConfig, initial_field
from ..noise.coefficients import DEFAULT_GAMMA, PRESETS, NoiseCoefficients, build_noise, coercivity_floor
from ..noise.marks import MarkSpaceSpec, mark_space_from_dict
from ..operators.truncation import CutoffSpec
from ..spectral.basis import BasisTable, build_basis
from ..utils.errors import IngestionError, SnsError
from ..utils.hashing import payload_hash


def mode_count(d: int, n_max: int) -> int:
    """Number N of real basis modes with 0 < |k|^2 <= n_max^2"""
    axis = np.arange(-n_max, n_max + 1)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    norm_sq = sum(g ** 2 for g in grids)
    nonzero = int(np.count_nonzero((norm_sq > 0) & (norm_sq <= n_max * n_max)))
    # half of the wave vectors are canonical, each with d-1 polarizations and a cos/sin pair
    return nonzero * (d - 1)


class BasisBlock(BaseModel):
    """Spectral basis on the periodic box"""
    d: int = Field(2, ge=2, le=3, description="Space dimension, 2 or 3")
    n_max: int = Field(..., ge=1, le=64, description="Maximal Euclidean wavenumber |k| of the retained modes")
    m: float = Field(3.0, description="Sobolev order of V_m, must exceed d/2 + 1")
    eta0: float = Field(0.5, gt=0.0, lt=1.0, description="Seed of the U-weight recursion, in (0, 1)")

    @model_validator(mode="after")
    def check_sobolev_order(self) -> "BasisBlock":
        if self.m <= self.d / 2 + 1:
            raise ValueError(f"m={self.m} must exceed d/2 + 1 = {self.d / 2 + 1}")
        return self

    @property
    def size(self) -> int:
        return mode_count(self.d, self.n_max)


class InitialBlock(BaseModel):
    """Initial field u0"""
    preset: str = Field("mode", description="One of zero, mode, random, coefficients")
    params: Dict[str, Any] = Field(default_factory=dict, description="Preset parameters (index, amplitude, seed, scale, decay, values)")

    @field_validator("preset")
    @classmethod
    def known_preset(cls, value: str) -> str:
        if value not in ("zero", "mode", "random", "coefficients"):
            raise ValueError(f"Unknown initial condition preset '{value}'")
        return value


class GalerkinBlock(BaseModel):
    """Galerkin levels, horizon and deterministic data"""
    levels: List[int] = Field(..., min_length=1, description="Galerkin levels n (number of retained modes), each in [1, N]")
    T: float = Field(..., gt=0.0, description="Horizon (time units)")
    dt: float = Field(..., gt=0.0, description="Base step of the time grid (time units), at most T")
    R_stop: Optional[float] = Field(None, ge=0.0, description="Stopping radius in H; null disables stopping")
    u0: InitialBlock = Field(default_factory=InitialBlock, description="Initial field")
    forcing: Optional[str] = Field(None, description="CSV of (time, mode, coefficient) rows, relative to the config file")
    forcing_level_exponent: float = Field(0.0, description="Forcing is multiplied by n^exponent at level n; 0 keeps it level-independent")
    include_stokes: bool = Field(True, description="Apply the Stokes semigroup")
    include_convection: bool = Field(True, description="Apply the truncated convection term")
    cutoff_smoothness: int = Field(1, ge=1, le=2, description="Smoothstep order of the convection cut-off")
    cutoff_radius: Optional[float] = Field(None, ge=0.0, description="U'-radius of the cut-off; the level n when null")
    bridge_depth: int = Field(8, ge=0, le=30, description="Dyadic depth of within-step Brownian bridges")

    @model_validator(mode="after")
    def check_grid(self) -> "GalerkinBlock":
        if self.dt > self.T:
            raise ValueError(f"dt={self.dt} exceeds the horizon T={self.T}")
        if len(set(self.levels)) != len(self.levels):
            raise ValueError("Galerkin levels must be distinct")
        return self


class NoiseBlock(BaseModel):
    """Jump and Wiener coefficients"""
    preset: str = Field("none", description="Noise preset name")
    params: Dict[str, float] = Field(default_factory=dict, description="Preset parameters (sigma_F, sigma_G, beta, ...)")
    marks: Optional[Dict[str, Any]] = Field(None, description="Mark space: kind atoms, box or power with its parameters")
    gamma: float = Field(DEFAULT_GAMMA, gt=0.0, description="Integrability excess gamma > 0")
    constants: Dict[str, Any] = Field(default_factory=dict, description="Declared constants L, C_p, a, lambda, kappa, L_G, C_G")

    @field_validator("preset")
    @classmethod
    def known_preset(cls, value: str) -> str:
        if value not in PRESETS:
            raise ValueError(f"Unknown noise preset '{value}', expected one of {sorted(PRESETS)}")
        return value

    @model_validator(mode="after")
    def check_coercivity_constant(self) -> "NoiseBlock":
        if "a" in self.constants:
            a, floor = float(self.constants["a"]), coercivity_floor(self.gamma)
            if not floor < a <= 2.0:
                raise ValueError(f"Coercivity constant a={a} outside ({floor:.6g}, 2]")
        if self.marks is not None:
            try:
                mark_space_from_dict(self.marks)
            except (SnsError, KeyError, TypeError) as e:
                raise ValueError(f"Invalid mark space: {e}")
        return self

    def mark_space(self) -> Optional[MarkSpaceSpec]:
        return mark_space_from_dict(self.marks) if self.marks is not None else None


class AnalysisBlock(BaseModel):
    """Moment orders, modulus and Aldous grids, tightness parameters"""
    p: List[float] = Field(default_factory=lambda: [2.0, 4.0], min_length=1, description="Moment orders, each in [1, 4 + gamma]")
    deltas: List[float] = Field(default_factory=lambda: [0.5, 0.25, 0.1], min_length=1, description="Modulus grid, each in (0, T]")
    thetas: List[float] = Field(default_factory=lambda: [0.0, 0.05, 0.1, 0.2], min_length=1, description="Aldous increments theta >= 0")
    etas: List[float] = Field(default_factory=lambda: [0.1, 0.5], min_length=1, description="Aldous thresholds eta > 0")
    stopping: str = Field("deterministic:0", description="Stopping rule, deterministic:t1,t2,... or hitting:level")
    q: float = Field(2.0, ge=1.0, description="Exponent of the L^q(0, T; V) statistic")
    eps: float = Field(0.1, gt=0.0, lt=1.0, description="Quantile level of the tightness conditions")
    alpha: float = Field(2.0, gt=0.0, description="Exponent of the Aldous moment criterion")
    confidence: float = Field(0.95, gt=0.0, lt=1.0, description="Level of all confidence intervals")
    refine: int = Field(0, ge=0, description="Uniform refinement of modulus candidate times")
    audit_paths: int = Field(3, ge=0, description="Paths per level checked for the energy and weak-form identities")
    taylor_samples: int = Field(10_000, ge=10, description="Pairs per sample of the Taylor inequality audit")

    @field_validator("thetas")
    @classmethod
    def nonnegative_thetas(cls, value: List[float]) -> List[float]:
        if any(t < 0 for t in value):
            raise ValueError("Aldous increments must be nonnegative")
        return value

    @field_validator("etas")
    @classmethod
    def positive_etas(cls, value: List[float]) -> List[float]:
        if any(e <= 0 for e in value):
            raise ValueError("Aldous thresholds must be positive")
        return value

    @field_validator("stopping")
    @classmethod
    def parseable_rule(cls, value: str) -> str:
        try:
            StoppingRule.parse(value)
        except SnsError as e:
            raise ValueError(str(e))
        return value


class RunBlock(BaseModel):
    """Ensemble size, seeds and workers"""
    M: int = Field(..., ge=1, description="Paths per level")
    base_seed: int = Field(0, ge=0, description="Seed of the first path; path i uses base_seed + i")
    workers: Optional[int] = Field(None, ge=1, description="Worker processes per ensemble; SNS_WORKERS or 1 when null")
    output_dir: Optional[str] = Field(None, description="Output directory; the configured output root when null")


class ExperimentConfig(BaseModel):
    """Complete experiment: basis, levels, noise, analysis grids and run parameters"""
    name: str = Field("experiment", description="Experiment name used in reports")
    basis: BasisBlock
    galerkin: GalerkinBlock
    noise: NoiseBlock = Field(default_factory=NoiseBlock)
    analysis: AnalysisBlock = Field(default_factory=AnalysisBlock)
    run: RunBlock

    _source_dir: str = PrivateAttr(default=".")

    @model_validator(mode="after")
    def check_cross_fields(self) -> "ExperimentConfig":
        size = self.basis.size
        for n in self.galerkin.levels:
            if not 1 <= n <= size:
                raise ValueError(f"Galerkin level n={n} outside [1, N={size}]")
        top = 4.0 + self.noise.gamma
        for p in self.analysis.p:
            if not 1.0 <= p <= top:
                raise ValueError(f"Moment order p={p} outside [1, 4 + gamma = {top:g}]")
        for delta in self.analysis.deltas:
            if not 0.0 < delta <= self.galerkin.T:
                raise ValueError(f"Modulus delta={delta} outside (0, T={self.galerkin.T}]")
        return self

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        """Read and validate a YAML (or JSON) experiment file

        Raises:
            IngestionError: unreadable file or schema violation
        """
        try:
            with open(path, "r", encoding="utf-8") as handle:
                payload = yaml.safe_load(handle)
        except (OSError, yaml.YAMLError) as e:
            raise IngestionError(f"Cannot read experiment config {path}: {e}")
        if not isinstance(payload, dict):
            raise IngestionError(f"Experiment config {path} must be a mapping")
        experiment = cls.from_dict(payload)
        experiment._source_dir = os.path.dirname(os.path.abspath(path))
        return experiment

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ExperimentConfig":
        try:
            return cls.model_validate(payload)
        except ValidationError as e:
            raise IngestionError(f"Experiment config failed validation: {e}")

    def with_seed(self, seed: int) -> "ExperimentConfig":
        experiment = self.model_copy(update={"run": self.run.model_copy(update={"base_seed": seed})})
        experiment._source_dir = self._source_dir
        return experiment

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON dump"""
        return payload_hash(self.model_dump(mode="json"))

    # builders

    def build_basis(self) -> BasisTable:
        return build_basis(self.basis.d, self.basis.n_max, self.basis.m, self.basis.eta0)

    def build_noise(self, basis: BasisTable, n: int) -> NoiseCoefficients:
        constants = dict(self.noise.constants)
        constants.setdefault("gamma", self.noise.gamma)
        return build_noise(self.noise.preset, basis, n, marks=self.noise.mark_space(),
                           params=self.noise.params, constants=constants)

    def forcing_path(self) -> Optional[str]:
        if self.galerkin.forcing is None:
            return None
        return os.path.join(self._source_dir, self.galerkin.forcing)

    def build_forcing(self, basis: BasisTable, n: Optional[int] = None) -> Optional[ForcingTable]:
        path = self.forcing_path()
        if path is None:
            return None
        forcing = ForcingTable.from_csv(path, basis.size)
        if n is not None and self.galerkin.forcing_level_exponent != 0.0:
            forcing = forcing.scaled(float(n) ** self.galerkin.forcing_level_exponent)
        return forcing

    def initial_state(self, basis: BasisTable, n: int) -> np.ndarray:
        return initial_field(basis, n, self.galerkin.u0.preset, self.galerkin.u0.params)

    def galerkin_config(self, basis: BasisTable, n: int) -> GalerkinConfig:
        """Configuration of level n, seeded with the base seed"""
        block = self.galerkin
        return GalerkinConfig(
            basis=basis,
            n=n,
            T=block.T,
            dt=block.dt,
            u0=self.initial_state(basis, n),
            noise=self.build_noise(basis, n),
            forcing=self.build_forcing(basis, n),
            R_stop=np.inf if block.R_stop is None else block.R_stop,
            seed=self.run.base_seed,
            include_stokes=block.include_stokes,
            include_convection=block.include_convection,
            cutoff=CutoffSpec(level=n, smoothness=block.cutoff_smoothness, radius=block.cutoff_radius),
            bridge_depth=block.bridge_depth,
            label=f"{self.name}/n={n}",
        )


class LevelSection(BaseModel):
    """Analysis of one Galerkin level"""
    n: int = Field(..., description="Galerkin level")
    directory: str = Field(..., description="Directory holding the level's ensemble")
    paths: int = Field(..., description="Successful paths analysed")
    failures: int = Field(..., description="Paths that failed to integrate")
    stop_statistics: Dict[str, Any] = Field(..., description="Stopping-time statistics")
    moments: Dict[str, Any] = Field(..., description="Moment estimates with bootstrap intervals")
    lyapunov_ordered: bool = Field(..., description="Whether E[X^p]^(1/p) is nondecreasing in p")
    tightness: Dict[str, Any] = Field(..., description="Tightness statistics and verdicts")
    aldous_moments: Dict[str, Any] = Field(..., description="Aldous moment criterion fit")
    energy: List[Dict[str, Any]] = Field(default_factory=list, description="Energy balance defects of the audited paths")
    weak_form: List[Dict[str, Any]] = Field(default_factory=list, description="Weak-form residuals of the audited paths")


class RunReport(BaseModel):
    """Everything ``analyze`` learned from the persisted ensembles"""
    config_hash: str = Field(..., description="Hash of the experiment configuration")
    name: str = Field(..., description="Experiment name")
    audits: Dict[str, Any] = Field(default_factory=dict, description="Per-module audit results")
    levels: List[LevelSection] = Field(default_factory=list, description="Per-level sections in increasing n")
    scan: Optional[Dict[str, Any]] = Field(None, description="Uniformity verdict across levels (three or more levels)")
    failure_count: int = Field(0, description="Failed paths over all levels")
    timing: Dict[str, float] = Field(default_factory=dict, description="Wall-clock seconds per phase")

    @property
    def verdict(self) -> bool:
        tight = all(level.tightness.get("verdict", False) for level in self.levels)
        scan_ok = self.scan is None or bool(self.scan.get("verdict", False))
        return tight and scan_ok and bool(self.audits.get("valid", True))

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    def deterministic_json(self) -> str:
        """JSON without timing fields; identical for identical config and seed"""
        return self.model_dump_json(indent=2, exclude={"timing"})

    def write(self, path: str) -> None:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.to_json())

    @classmethod
    def load(cls, path: str) -> "RunReport":
        try:
            with open(path, "r", encoding="utf-8") as handle:
                return cls.model_validate_json(handle.read())
        except OSError as e:
            raise IngestionError(f"Cannot read report {path}: {e}")
        except ValidationError as e:
            raise IngestionError(f"Report {path} failed validation: {e}")
