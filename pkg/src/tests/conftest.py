"""Shared fixtures: small bases, level configs and tiny experiment files"""

import numpy as np
import pytest
import yaml

from ..galerkin.config import GalerkinConfig
from ..noise.coefficients import build_noise
from ..noise.marks import AtomicMarks
from ..spectral.basis import build_basis


@pytest.fixture(scope="session")
def unit_basis():
    """d = 2, n_max = 1: the four modes with |k| = 1"""
    return build_basis(2, 1)


@pytest.fixture(scope="session")
def basis():
    """d = 2, n_max = 2: twelve modes"""
    return build_basis(2, 2)


@pytest.fixture
def heat_config(unit_basis):
    """Pure Stokes decay of e_1 with unit amplitude"""
    u0 = np.zeros(unit_basis.size)
    u0[0] = 1.0
    return GalerkinConfig(unit_basis, n=4, T=1.0, dt=0.1, u0=u0, include_convection=False)


@pytest.fixture
def additive_config(basis):
    """Convection, forcing-free, additive jump and Wiener noise on level 6"""
    marks = AtomicMarks(points=[[1.0], [-1.0]], weights=[1.5, 1.5])
    noise = build_noise("additive", basis, 6, marks=marks,
                        params={"jump_amplitude": 0.2, "sigma": 0.1, "wiener_modes": 2})
    u0 = np.zeros(basis.size)
    u0[:3] = [0.5, -0.3, 0.2]
    return GalerkinConfig(basis, n=6, T=1.0, dt=0.05, u0=u0, noise=noise, seed=5)


def tiny_experiment(**overrides):
    payload = {
        "name": "tiny",
        "basis": {"d": 2, "n_max": 1},
        "galerkin": {"levels": [2, 4], "T": 0.5, "dt": 0.1,
                     "u0": {"preset": "mode", "params": {"index": 1, "amplitude": 0.5}}},
        "noise": {"preset": "additive",
                  "params": {"jump_amplitude": 0.2, "sigma": 0.1, "wiener_modes": 1},
                  "marks": {"kind": "atoms", "points": [[1.0]], "weights": [1.0]}},
        "analysis": {"p": [2, 4], "deltas": [0.25, 0.1], "thetas": [0.0, 0.1, 0.2], "etas": [0.1],
                     "audit_paths": 1, "taylor_samples": 200},
        "run": {"M": 3, "base_seed": 1, "workers": 1},
    }
    for key, value in overrides.items():
        payload[key] = {**payload.get(key, {}), **value} if isinstance(value, dict) else value
    return payload


@pytest.fixture
def experiment_file(tmp_path):
    """Writer of experiment YAML files under tmp_path"""
    def write(name="tiny.yaml", **overrides):
        target = tmp_path / name
        target.write_text(yaml.safe_dump(tiny_experiment(**overrides)), encoding="utf-8")
        return str(target)
    return write
