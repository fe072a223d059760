"""Experiment models, command implementations and exit codes of the sns-levy entry point"""

import csv
import json
import os

import pytest

from ..cli.commands import basis_checks, cmd_report, cmd_validate
from ..cli.main import main
from ..cli.models import ExperimentConfig, RunReport, mode_count
from ..utils.errors import AssumptionFailure, IngestionError
from .conftest import tiny_experiment

GRADIENT_NOISE = {"preset": "gradient-multiplicative", "params": {"beta": 1.2}, "marks": None}


@pytest.mark.parametrize("d, n_max, expected", [(2, 1, 4), (2, 2, 12), (2, 4, 48), (3, 1, 12)])
def test_mode_count(d, n_max, expected):
    assert mode_count(d, n_max) == expected


def test_experiment_builders():
    experiment = ExperimentConfig.from_dict(tiny_experiment())
    assert experiment.basis.size == 4
    basis = experiment.build_basis()
    cfg = experiment.galerkin_config(basis, 2)
    assert cfg.n == 2 and cfg.seed == 1
    assert cfg.u0[0] == pytest.approx(0.5)
    assert cfg.noise.preset == "additive"
    assert cfg.forcing is None


def test_config_hash_follows_the_seed():
    experiment = ExperimentConfig.from_dict(tiny_experiment())
    assert experiment.config_hash() == ExperimentConfig.from_dict(tiny_experiment()).config_hash()
    reseeded = experiment.with_seed(9)
    assert reseeded.run.base_seed == 9
    assert reseeded.config_hash() != experiment.config_hash()


@pytest.mark.parametrize("overrides", [
    {"galerkin": {"dt": 1.0}},
    {"galerkin": {"levels": [5]}},
    {"galerkin": {"levels": [2, 2]}},
    {"basis": {"n_max": 0}},
    {"basis": {"m": 1.5}},
    {"noise": {"preset": "cubic"}},
    {"noise": {"constants": {"a": 1.2}}},
    {"analysis": {"p": [6]}},
    {"analysis": {"deltas": [0.75]}},
    {"analysis": {"etas": [0.0]}},
    {"analysis": {"stopping": "random:1"}},
    {"run": {"M": 0}},
])
def test_schema_violations(overrides):
    with pytest.raises(IngestionError):
        ExperimentConfig.from_dict(tiny_experiment(**overrides))


def test_load_rejects_unreadable_files(tmp_path):
    with pytest.raises(IngestionError):
        ExperimentConfig.load(str(tmp_path / "missing.yaml"))
    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("42\n", encoding="utf-8")
    with pytest.raises(IngestionError):
        ExperimentConfig.load(str(scalar))


def test_basis_checks_pass(unit_basis):
    results = basis_checks(unit_basis)
    assert [r["rule"] for r in results] == ["basis_orthonormal", "U_embedding", "b_cancellation"]
    assert all(r["valid"] for r in results)


def test_validate_additive_experiment(tmp_path):
    experiment = ExperimentConfig.from_dict(tiny_experiment())
    summary = cmd_validate(experiment, str(tmp_path))
    assert summary["valid"]
    assert sorted(summary["levels"]) == ["2", "4"]
    assert os.path.exists(tmp_path / "validation.json")


def test_validate_reports_failed_coercivity():
    experiment = ExperimentConfig.from_dict(tiny_experiment(noise=GRADIENT_NOISE))
    summary = cmd_validate(experiment, strict=False)
    assert not summary["valid"]
    assert summary["failed_rules"] == ["G_coercivity_range"]
    with pytest.raises(AssumptionFailure) as info:
        cmd_validate(experiment, level=2)
    assert info.value.assumption == "G_coercivity_range"


def test_main_exit_codes(experiment_file, tmp_path):
    out = str(tmp_path / "out")
    assert main(["validate", "--config", experiment_file(), "--out", out]) == 0
    assert main(["validate", "--config", experiment_file("gradient.yaml", noise=GRADIENT_NOISE), "--out", out]) == 2
    assert main(["validate", "--config", experiment_file("bad.yaml", basis={"n_max": 0}), "--out", out]) == 4
    assert main(["validate", "--config", str(tmp_path / "missing.yaml"), "--out", out]) == 4
    assert main(["validate", "--config", experiment_file(), "--out", out, "--level", "3"]) == 4


def _read_csv(filename):
    with open(filename, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    assert lines[0].startswith("# config_hash=")
    return list(csv.DictReader(lines[1:]))


def test_simulate_analyze_report(experiment_file, tmp_path, capsys):
    config_file = experiment_file()
    out = str(tmp_path / "run")
    assert main(["simulate", "--config", config_file, "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "level_2", "manifest.json"))
    assert os.path.exists(os.path.join(out, "level_4", "path_2.bin"))
    assert os.path.exists(os.path.join(out, "basis.csv"))

    assert main(["analyze", "--config", config_file, "--out", out]) == 0
    assert "Verdict:" in capsys.readouterr().out
    report_file = os.path.join(out, "report.json")
    report = RunReport.load(report_file)
    assert [level.n for level in report.levels] == [2, 4]
    assert all(level.paths == 3 for level in report.levels)
    assert report.scan is None
    assert len(report.audits["taylor"]) == 3
    for level in report.levels:
        assert all(entry["residual"] < 1e-10 for entry in level.weak_form)

    assert main(["report", "--report", report_file]) == 0
    for name in ("summary.txt", "moments.csv", "modulus_curves.csv", "aldous.csv", "audits.csv"):
        assert os.path.exists(os.path.join(out, name))
    rows = _read_csv(os.path.join(out, "modulus_curves.csv"))
    expected = [(level.n, d, w) for level in report.levels
                for d, w in zip(level.tightness["modulus_curve"]["deltas"], level.tightness["modulus_curve"]["values"])]
    assert [(int(r["n"]), float(r["delta"]), float(r["modulus"])) for r in rows] == expected
    assert len(_read_csv(os.path.join(out, "aldous.csv"))) == 2 * 3


def test_analyze_is_deterministic(experiment_file, tmp_path):
    config_file = experiment_file()
    ensembles = str(tmp_path / "run")
    assert main(["simulate", "--config", config_file, "--out", ensembles, "--level", "2"]) == 0
    reports = []
    for name in ("first", "second"):
        out = str(tmp_path / name)
        assert main(["analyze", "--config", config_file, "--ensemble-dir", ensembles, "--out", out,
                     "--level", "2"]) == 0
        reports.append(RunReport.load(os.path.join(out, "report.json")).deterministic_json())
    assert reports[0] == reports[1]


def test_analyze_rejects_foreign_ensembles(experiment_file, tmp_path):
    config_file = experiment_file()
    out = str(tmp_path / "run")
    assert main(["simulate", "--config", config_file, "--out", out, "--level", "2"]) == 0
    assert main(["analyze", "--config", config_file, "--out", out, "--level", "2", "--seed", "7"]) == 4
    assert main(["analyze", "--config", config_file, "--out", out, "--level", "4"]) == 4


def test_report_rejects_empty_and_missing_reports(tmp_path):
    empty = tmp_path / "report.json"
    RunReport(config_hash="0" * 64, name="empty").write(str(empty))
    with pytest.raises(IngestionError):
        cmd_report(str(empty))
    with pytest.raises(IngestionError):
        cmd_report(str(tmp_path / "absent.json"))
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps({"name": "no hash"}), encoding="utf-8")
    assert main(["report", "--report", str(broken)]) == 4
