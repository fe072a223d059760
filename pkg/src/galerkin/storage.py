"""Binary, CSV and manifest persistence of paths and ensembles

A path file is ``b"SNSP"``, a little-endian uint16 version, a uint32 header
length, the UTF-8 JSON header and then one packed little-endian record per
event.
"""

import csv
import json
import logging
import os
import struct
from typing import Any, Dict, List, Optional

import numpy as np

from ..spectral.basis import BasisTable
from ..utils.errors import IngestionError
from ..utils.hashing import canonical_json
from .config import GalerkinConfig
from .ensemble import Ensemble, PathFailure
from .path import CadlagPath, KIND_NAMES

logger = logging.getLogger("sns_levy.galerkin.storage")

MAGIC = b"SNSP"
VERSION = 1
PREFIX = struct.Struct("<HI")
MANIFEST_NAME = "manifest.json"


def record_dtype(n: int) -> np.dtype:
    return np.dtype([
        ("time", "<f8"),
        ("kind", "u1"),
        ("mark", "<f8"),
        ("state", "<f8", (n,)),
        ("left", "<f8", (n,)),
        ("ledger_jump", "<f8", (n,)),
        ("ledger_wiener", "<f8", (n,)),
    ])


def path_bytes(path: CadlagPath, config_hash: str) -> bytes:
    """Serialized form of one path; marks keep their first component only"""
    header = canonical_json({
        "config_hash": config_hash,
        "basis_hash": path.basis.basis_hash(),
        "n": path.n,
        "seed": path.seed,
        "horizon": path.horizon,
        "stopped_at": path.stopped_at,
        "stokes": bool(np.any(path.decay_rates != 0)),
    }).encode("utf-8")
    records = np.zeros(path.record_count, dtype=record_dtype(path.n))
    records["time"] = path.times
    records["kind"] = path.kinds
    records["mark"] = path.marks[:, 0]
    records["state"] = path.states
    records["left"] = path.left
    records["ledger_jump"] = path.ledger_jump
    records["ledger_wiener"] = path.ledger_wiener
    return MAGIC + PREFIX.pack(VERSION, len(header)) + header + records.tobytes()


def write_path(path: CadlagPath, filename: str, config_hash: str) -> None:
    with open(filename, "wb") as handle:
        handle.write(path_bytes(path, config_hash))


def read_path(filename: str, basis: BasisTable, config_hash: Optional[str] = None) -> CadlagPath:
    """Load a path file, checking the basis and (when given) the config hash

    Raises:
        IngestionError: Missing file, bad layout or provenance mismatch
    """
    try:
        with open(filename, "rb") as handle:
            blob = handle.read()
    except OSError as e:
        raise IngestionError(f"Cannot read path file {filename}: {e}")
    if blob[:4] != MAGIC:
        raise IngestionError(f"{filename} is not a path file")
    version, header_length = PREFIX.unpack_from(blob, 4)
    if version != VERSION:
        raise IngestionError(f"{filename}: unsupported path format version {version}")
    start = 4 + PREFIX.size
    try:
        header = json.loads(blob[start:start + header_length].decode("utf-8"))
    except ValueError as e:
        raise IngestionError(f"{filename}: unreadable header: {e}")
    if config_hash is not None and header["config_hash"] != config_hash:
        raise IngestionError(f"{filename} was produced by config {header['config_hash'][:12]}, "
                             f"expected {config_hash[:12]}")
    if header["basis_hash"] != basis.basis_hash():
        raise IngestionError(f"{filename} was produced on a different basis")

    n = int(header["n"])
    records = np.frombuffer(blob, dtype=record_dtype(n), offset=start + header_length)
    rates = np.array(basis.eigenvalues[:n]) if header["stokes"] else np.zeros(n)
    return CadlagPath(
        basis=basis,
        n=n,
        horizon=float(header["horizon"]),
        times=records["time"].copy(),
        kinds=records["kind"].copy(),
        marks=records["mark"].reshape(-1, 1).copy(),
        states=records["state"].copy(),
        left=records["left"].copy(),
        ledger_jump=records["ledger_jump"].copy(),
        ledger_wiener=records["ledger_wiener"].copy(),
        decay_rates=rates,
        stopped_at=header["stopped_at"],
        seed=int(header["seed"]),
    )


def paths_csv_rows(paths: List[CadlagPath]) -> List[List[Any]]:
    n = paths[0].n if paths else 0
    rows: List[List[Any]] = [["seed", "time", "kind", "mark", *[f"a{i + 1}" for i in range(n)]]]
    for path in paths:
        for k in range(path.record_count):
            rows.append([path.seed, repr(float(path.times[k])), KIND_NAMES[int(path.kinds[k])],
                         repr(float(path.marks[k, 0])), *[repr(float(v)) for v in path.states[k]]])
    return rows


def write_paths_csv(paths: List[CadlagPath], filename: str) -> None:
    with open(filename, "w", encoding="utf-8", newline="") as handle:
        csv.writer(handle, lineterminator="\n").writerows(paths_csv_rows(paths))


def write_ensemble(ensemble: Ensemble, directory: str, config_hash: str, basis: BasisTable) -> Dict[str, Any]:
    """Write ``path_<i>.bin``, ``paths.csv`` and ``manifest.json`` into directory"""
    os.makedirs(directory, exist_ok=True)
    files = []
    for i, path in enumerate(ensemble.paths):
        name = f"path_{i}.bin"
        write_path(path, os.path.join(directory, name), config_hash)
        files.append(name)
    write_paths_csv(ensemble.paths, os.path.join(directory, "paths.csv"))

    manifest = {
        "config_hash": config_hash,
        "basis_hash": basis.basis_hash(),
        "files": files,
        "seeds": ensemble.seeds,
        **ensemble.to_dict(),
    }
    with open(os.path.join(directory, MANIFEST_NAME), "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
    logger.info(f"Wrote {len(files)} paths for n={ensemble.n} to {directory}")
    return manifest


def read_manifest(directory: str, config_hash: Optional[str] = None) -> Dict[str, Any]:
    filename = os.path.join(directory, MANIFEST_NAME)
    try:
        with open(filename, "r", encoding="utf-8") as handle:
            manifest = json.load(handle)
    except (OSError, ValueError) as e:
        raise IngestionError(f"Cannot read manifest {filename}: {e}")
    if config_hash is not None and manifest.get("config_hash") != config_hash:
        raise IngestionError(f"Manifest {filename} does not match the loaded configuration")
    return manifest


def load_ensemble(directory: str, basis: BasisTable, config_hash: Optional[str] = None,
                  cfg: Optional[GalerkinConfig] = None) -> Ensemble:
    """Rebuild an ensemble from a directory written by ``write_ensemble``

    Args:
        directory: Level directory
        basis: Basis the paths were simulated on
        config_hash: Required provenance hash, unchecked when None
        cfg: Configuration re-attached to every path (with its seed)
    """
    manifest = read_manifest(directory, config_hash)
    ensemble = Ensemble(n=int(manifest["n"]), base_seed=int(manifest["base_seed"]),
                        requested=int(manifest["requested"]))
    for name in manifest["files"]:
        path = read_path(os.path.join(directory, name), basis, config_hash)
        if cfg is not None:
            path.config = cfg.with_seed(path.seed)
        ensemble.paths.append(path)
    ensemble.failures = [PathFailure(**f) for f in manifest.get("failures", [])]
    logger.debug(f"Loaded {ensemble.size} paths from {directory}")
    return ensemble
