"""Binary path files, ensemble directories and provenance checks"""

import json
import os

import numpy as np
import pytest

from ..galerkin.ensemble import simulate_ensemble
from ..galerkin.solver import simulate_path, weak_form_residual
from ..galerkin.storage import (MANIFEST_NAME, load_ensemble, read_manifest, read_path, write_ensemble,
                                write_path)
from ..spectral.basis import build_basis
from ..utils.errors import IngestionError

HASH = "a" * 64


def test_path_file_round_trip(tmp_path, additive_config):
    path = simulate_path(additive_config)
    filename = str(tmp_path / "path.bin")
    write_path(path, filename, HASH)
    loaded = read_path(filename, additive_config.basis, HASH)
    assert loaded.n == path.n and loaded.seed == path.seed
    assert np.array_equal(loaded.times, path.times)
    assert np.array_equal(loaded.kinds, path.kinds)
    assert np.array_equal(loaded.states, path.states)
    assert np.array_equal(loaded.ledger_jump, path.ledger_jump)
    assert np.array_equal(loaded.decay_rates, path.decay_rates)
    # identities can be rechecked on a reloaded path
    assert weak_form_residual(loaded, cfg=additive_config) < 1e-10


def test_read_path_checks_provenance(tmp_path, additive_config):
    filename = str(tmp_path / "path.bin")
    write_path(simulate_path(additive_config), filename, HASH)
    with pytest.raises(IngestionError):
        read_path(filename, additive_config.basis, "b" * 64)
    with pytest.raises(IngestionError):
        read_path(filename, build_basis(2, 2, eta0=0.25), HASH)


def test_read_path_rejects_foreign_files(tmp_path, basis):
    foreign = tmp_path / "foreign.bin"
    foreign.write_bytes(b"not a path file")
    with pytest.raises(IngestionError):
        read_path(str(foreign), basis)
    with pytest.raises(IngestionError):
        read_path(str(tmp_path / "missing.bin"), basis)


def test_ensemble_directory_round_trip(tmp_path, additive_config):
    ensemble = simulate_ensemble(additive_config, M=3, base_seed=4)
    directory = str(tmp_path / "level_6")
    manifest = write_ensemble(ensemble, directory, HASH, additive_config.basis)
    assert manifest["files"] == ["path_0.bin", "path_1.bin", "path_2.bin"]
    assert manifest["seeds"] == [4, 5, 6]
    assert os.path.exists(os.path.join(directory, "paths.csv"))

    loaded = load_ensemble(directory, additive_config.basis, HASH, additive_config)
    assert loaded.seeds == ensemble.seeds
    assert loaded.n == ensemble.n and loaded.requested == 3
    for original, copy in zip(ensemble.paths, loaded.paths):
        assert np.array_equal(original.states, copy.states)
        assert copy.config.seed == copy.seed


def test_paths_csv_has_one_row_per_record(tmp_path, additive_config):
    ensemble = simulate_ensemble(additive_config, M=2)
    directory = str(tmp_path / "level")
    write_ensemble(ensemble, directory, HASH, additive_config.basis)
    with open(os.path.join(directory, "paths.csv"), encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    assert lines[0].startswith("seed,time,kind,mark,a1")
    assert len(lines) == 1 + sum(p.record_count for p in ensemble.paths)


def test_manifest_hash_mismatch(tmp_path, additive_config):
    directory = str(tmp_path / "level")
    write_ensemble(simulate_ensemble(additive_config, M=1), directory, HASH, additive_config.basis)
    assert read_manifest(directory, HASH)["config_hash"] == HASH
    with pytest.raises(IngestionError):
        read_manifest(directory, "c" * 64)
    with pytest.raises(IngestionError):
        load_ensemble(directory, additive_config.basis, "c" * 64)


def test_missing_manifest(tmp_path, basis):
    with pytest.raises(IngestionError):
        read_manifest(str(tmp_path))
    (tmp_path / MANIFEST_NAME).write_text("{broken", encoding="utf-8")
    with pytest.raises(IngestionError):
        read_manifest(str(tmp_path))


def test_manifest_records_failures_field(tmp_path, additive_config):
    directory = str(tmp_path / "level")
    write_ensemble(simulate_ensemble(additive_config, M=2), directory, HASH, additive_config.basis)
    with open(os.path.join(directory, MANIFEST_NAME), encoding="utf-8") as handle:
        manifest = json.load(handle)
    assert manifest["failed"] == 0 and manifest["failures"] == []
    assert manifest["basis_hash"] == additive_config.basis.basis_hash()
