"""Galerkin dynamics: configuration, jump-adapted integration, ensembles and persistence"""

from .config import ForcingTable, GalerkinConfig, initial_field
from .path import CadlagPath, GRID, JUMP, STOP, KIND_NAMES, interpolant_weights
from .solver import (
    GalerkinSolver,
    StepEvent,
    step,
    simulate_path,
    weak_form_defects,
    weak_form_residual,
    weak_form_residuals,
)
from .ensemble import Ensemble, PathFailure, simulate_ensemble
from .storage import (
    write_path,
    read_path,
    path_bytes,
    write_paths_csv,
    write_ensemble,
    read_manifest,
    load_ensemble,
)

__all__ = [
    'ForcingTable', 'GalerkinConfig', 'initial_field',
    'CadlagPath', 'GRID', 'JUMP', 'STOP', 'KIND_NAMES', 'interpolant_weights',
    'GalerkinSolver', 'StepEvent', 'step', 'simulate_path', 'weak_form_residual', 'weak_form_residuals',
    'weak_form_defects',
    'Ensemble', 'PathFailure', 'simulate_ensemble',
    'write_path', 'read_path', 'path_bytes', 'write_paths_csv', 'write_ensemble', 'read_manifest',
    'load_ensemble',
]
