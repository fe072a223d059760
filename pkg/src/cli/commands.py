"""
Command implementations: validate, simulate, analyze, report
"""

import csv
import json
import logging
import os
import time
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..analysis.aldous import StoppingRule, aldous_estimate, aldous_moment_estimate
from ..analysis.tightness import tightness_report
from ..estimates.energy import energy_balance
from ..estimates.moments import moment_estimates
from ..estimates.scan import constant_scan
from ..estimates.taylor import taylor_inequality_audit
from ..galerkin.ensemble import simulate_ensemble
from ..galerkin.solver import weak_form_residual
from ..galerkin.storage import load_ensemble, read_manifest, write_ensemble
from ..noise.validator import (
    AssumptionValidator,
    default_samples,
    validate_F,
    validate_G_coercivity,
    validate_G_lipschitz,
    validate_forcing,
)
from ..operators.audit import cancellation_audit
from ..spectral.basis import BasisTable
from ..spectral.weights import embedding_norm_search
from ..utils.config import config
from ..utils.errors import AssumptionFailure, IngestionError, IntegrationFailure
from .models import ExperimentConfig, LevelSection, RunReport

logger = logging.getLogger("sns_levy.cli.commands")

REPORT_NAME = "report.json"
VALIDATION_NAME = "validation.json"
BASIS_NAME = "basis.csv"
EXPERIMENT_NAME = "experiment.json"


def level_directory(root: str, n: int) -> str:
    return os.path.join(root, f"level_{n}")


def _selected_levels(experiment: ExperimentConfig, level: Optional[int]) -> List[int]:
    levels = sorted(experiment.galerkin.levels)
    if level is None:
        return levels
    if level not in levels:
        raise IngestionError(f"Level {level} is not one of the configured levels {levels}")
    return [level]


def _write_json(payload: Dict[str, Any], filename: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(filename)), exist_ok=True)
    with open(filename, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True, default=str)


def _write_csv(filename: str, config_hash: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    with open(filename, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"# config_hash={config_hash}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


# validate

def basis_checks(basis: BasisTable) -> List[Dict[str, Any]]:
    """Orthonormality of the basis, the U-into-V_m embedding bound and the cancellation of b"""
    gram = basis.gram_matrix()
    gram_error = float(np.max(np.abs(gram - np.eye(basis.size))))
    embedding = embedding_norm_search(basis.weights, basis.vm_norms, samples=2_000)
    bound = 1.0 - basis.eta0
    cancellation = cancellation_audit(basis, pairs=20)
    return [
        {"rule": "basis_orthonormal", "valid": gram_error <= config.gram_tolerance,
         "message": f"max |G - I| = {gram_error:.3e}", "details": {"gram_error": gram_error, "N": basis.size}},
        {"rule": "U_embedding", "valid": embedding <= bound,
         "message": f"largest |x|_Vm / |x|_U = {embedding:.6g} (bound {bound:g})",
         "details": {"ratio": embedding, "bound": bound}},
        {"rule": "b_cancellation", "valid": cancellation["valid"],
         "message": f"max relative b(u, v, v) = {cancellation['self']:.3e}, "
                    f"b(u, w, v) + b(u, v, w) = {cancellation['antisymmetry']:.3e}",
         "details": cancellation},
    ]


def cmd_validate(experiment: ExperimentConfig, out: Optional[str] = None, strict: bool = True,
                 level: Optional[int] = None) -> Dict[str, Any]:
    """Audit the basis, the noise assumptions and the data of every level

    Args:
        experiment: Loaded experiment
        out: Directory for ``validation.json``; nothing is written when None
        strict: Raise AssumptionFailure on the first failed noise or data rule
        level: Restrict the noise and data audits to one level

    Returns:
        Summary with per-level rule results and an overall ``valid`` flag
    """
    basis = experiment.build_basis()
    summary: Dict[str, Any] = {"config_hash": experiment.config_hash(), "basis": basis_checks(basis), "levels": {}}
    failed: List[Dict[str, Any]] = [r for r in summary["basis"] if not r["valid"]]

    for n in _selected_levels(experiment, level):
        noise = experiment.build_noise(basis, n)
        samples = default_samples(noise, seed=experiment.run.base_seed)
        forcing = experiment.build_forcing(basis, n)
        audits = {
            "F": validate_F(noise, samples),
            "G_coercivity": validate_G_coercivity(noise, samples),
            "G_lipschitz": validate_G_lipschitz(noise, samples),
        }
        data = validate_forcing(experiment.initial_state(basis, n), forcing, experiment.galerkin.T)
        summary["levels"][str(n)] = {"noise": noise.describe(), "data": data,
                                     **{name: result for name, result in audits.items()}}
        for result in audits.values():
            failed.extend(r for r in result["rule_results"] if not r["valid"])
        if not data["valid"]:
            failed.append(data)

    summary["valid"] = not failed
    summary["failed_rules"] = sorted({r["rule"] for r in failed})
    if out is not None:
        _write_json(summary, os.path.join(out, VALIDATION_NAME))
    logger.info(f"Validation of {experiment.name}: {'passed' if summary['valid'] else 'failed'}"
                + (f" ({', '.join(summary['failed_rules'])})" if failed else ""))

    if strict and failed:
        first = failed[0]
        raise AssumptionFailure(first["rule"], first["message"], witness=first.get("details"))
    return summary


# simulate

def cmd_simulate(experiment: ExperimentConfig, out: str, workers: Optional[int] = None,
                 level: Optional[int] = None) -> Dict[str, Any]:
    """Simulate and persist one ensemble per level under ``<out>/level_<n>/``

    Raises:
        IntegrationFailure: some paths produced non-finite states (after all levels are written)
    """
    basis = experiment.build_basis()
    config_hash = experiment.config_hash()
    workers = workers or experiment.run.workers or config.default_workers
    os.makedirs(out, exist_ok=True)
    basis.to_csv(os.path.join(out, BASIS_NAME))
    _write_json({"config_hash": config_hash, "experiment": experiment.model_dump(mode="json")},
                os.path.join(out, EXPERIMENT_NAME))

    manifests, failures = {}, []
    for n in _selected_levels(experiment, level):
        started = time.perf_counter()
        cfg = experiment.galerkin_config(basis, n)
        ensemble = simulate_ensemble(cfg, experiment.run.M, experiment.run.base_seed, workers)
        manifests[n] = write_ensemble(ensemble, level_directory(out, n), config_hash, basis)
        failures.extend(ensemble.failures)
        stats = ensemble.stop_statistics()
        logger.info(f"Level n={n}: {ensemble.size}/{ensemble.requested} paths, "
                    f"{stats['stopped']} stopped, {time.perf_counter() - started:.2f}s")

    if failures:
        first = failures[0]
        raise IntegrationFailure(f"{len(failures)} path(s) failed, first seed {first.seed}: {first.message}",
                                 first.last_good_time)
    return {"config_hash": config_hash, "out": out, "levels": manifests}


# analyze

def _analyze_level(experiment: ExperimentConfig, basis: BasisTable, directory: str, n: int,
                   config_hash: str):
    analysis = experiment.analysis
    cfg = experiment.galerkin_config(basis, n)
    ensemble = load_ensemble(directory, basis, config_hash, cfg)
    ensemble.require_paths()

    moments = moment_estimates(ensemble, analysis.p, gamma=experiment.noise.gamma,
                               confidence=analysis.confidence, seed=experiment.run.base_seed)
    rule = StoppingRule.parse(analysis.stopping)
    aldous = aldous_estimate(ensemble.paths, rule, analysis.thetas, analysis.etas, confidence=analysis.confidence)
    aldous_moments = aldous_moment_estimate(ensemble.paths, rule, analysis.thetas, analysis.alpha, analysis.etas)
    tightness = tightness_report(ensemble, analysis.q, analysis.deltas, analysis.eps, refine=analysis.refine,
                                 aldous=aldous)

    audited = ensemble.paths[:analysis.audit_paths]
    energy = [{"seed": p.seed, **energy_balance(p).to_dict()} for p in audited]
    weak_form = [{"seed": p.seed, "residual": weak_form_residual(p), "tolerance": config.residual_tolerance}
                 for p in audited]

    section = LevelSection(
        n=n,
        directory=directory,
        paths=ensemble.size,
        failures=len(ensemble.failures),
        stop_statistics=ensemble.stop_statistics(),
        moments=moments.to_dict(),
        lyapunov_ordered=moments.lyapunov_ordered(),
        tightness=tightness.to_dict(),
        aldous_moments=aldous_moments,
        energy=energy,
        weak_form=weak_form,
    )
    return section, moments


def taylor_audits(experiment: ExperimentConfig) -> List[Dict[str, Any]]:
    """Taylor inequality audit at p = 2, 4 and 4 + gamma"""
    orders = sorted({2.0, 4.0, 4.0 + experiment.noise.gamma})
    return [taylor_inequality_audit(p, samples=experiment.analysis.taylor_samples, seed=experiment.run.base_seed)
            for p in orders]


def cmd_analyze(experiment: ExperimentConfig, ensemble_dir: str, level: Optional[int] = None,
                out: Optional[str] = None) -> RunReport:
    """Build the RunReport of the persisted ensembles and write ``report.json``

    Args:
        experiment: Experiment the ensembles were simulated with
        ensemble_dir: Root written by ``cmd_simulate``
        level: Restrict the analysis to one level
        out: Directory of ``report.json``; the ensemble root when None

    Raises:
        IngestionError: missing artifacts or a config hash mismatch
    """
    basis = experiment.build_basis()
    config_hash = experiment.config_hash()
    timing: Dict[str, float] = {}

    started = time.perf_counter()
    validator_results = AssumptionValidator(experiment.build_noise(basis, min(experiment.galerkin.levels))).validate()
    audits: Dict[str, Any] = {
        "basis": basis_checks(basis),
        "assumptions": validator_results,
        "taylor": taylor_audits(experiment),
    }
    audits["valid"] = bool(validator_results["valid"]
                           and all(r["valid"] for r in audits["basis"])
                           and not any(t["refit"] for t in audits["taylor"]))
    timing["audits"] = time.perf_counter() - started

    sections, reports = [], []
    for n in _selected_levels(experiment, level):
        started = time.perf_counter()
        section, moments = _analyze_level(experiment, basis, level_directory(ensemble_dir, n), n, config_hash)
        sections.append(section)
        reports.append(moments)
        timing[f"level_{n}"] = time.perf_counter() - started

    scan = None
    if len(reports) >= 3:
        scan = constant_scan(reports, confidence=experiment.analysis.confidence).to_dict()

    report = RunReport(
        config_hash=config_hash,
        name=experiment.name,
        audits=audits,
        levels=sections,
        scan=scan,
        failure_count=sum(s.failures for s in sections),
        timing=timing,
    )
    report.write(os.path.join(out or ensemble_dir, REPORT_NAME))
    logger.info(f"Report for {experiment.name} written: verdict {'pass' if report.verdict else 'fail'}")
    return report


# report

def summary_text(report: RunReport) -> str:
    """Human-readable summary of a RunReport"""
    lines = [
        f"Experiment: {report.name}",
        f"Config hash: {report.config_hash}",
        f"Audits valid: {report.audits.get('valid')}",
        f"Failed paths: {report.failure_count}",
        "",
    ]
    for level in report.levels:
        tight = level.tightness
        lines.append(f"Level n={level.n}: {level.paths} paths, {level.failures} failures, "
                     f"{level.stop_statistics.get('stopped', 0)} stopped")
        for p, estimate in level.moments["sup_moments"].items():
            lines.append(f"  E[sup |u|_H^{p}] = {estimate['mean']:.6g} "
                         f"[{estimate['ci_low']:.6g}, {estimate['ci_high']:.6g}]")
        v = level.moments.get("v_integral")
        if v is not None:
            lines.append(f"  E[int ||u||_V^2] = {v['mean']:.6g} [{v['ci_low']:.6g}, {v['ci_high']:.6g}]")
        lines.append(f"  tightness: a={tight['condition_a']} b={tight['condition_b']} c={tight['condition_c']} "
                     f"(threshold {tight['threshold']:.4g})")
    if report.scan is not None:
        lines.append("")
        lines.append(f"Uniformity across levels {report.scan['levels']}: "
                     f"{'pass' if report.scan['verdict'] else 'fail'}")
        for trend in report.scan["trends"]:
            lines.append(f"  {trend['statistic']}: slope {trend['slope']:.4g}, ratios "
                         + ", ".join(f"{r:.3g}" for r in trend["ratios"]))
    lines.append("")
    lines.append(f"Verdict: {'pass' if report.verdict else 'fail'}")
    return "\n".join(lines) + "\n"


def check_artifacts(report: RunReport) -> None:
    """Every referenced level directory exists and carries the report's config hash"""
    for level in report.levels:
        read_manifest(level.directory, report.config_hash)


def cmd_report(report_path: str, out: Optional[str] = None) -> Dict[str, str]:
    """Write ``summary.txt`` and the CSV bundle next to the report (or into ``out``)

    Raises:
        IngestionError: unreadable or empty report, or artifacts not matching its hash
    """
    report = RunReport.load(report_path)
    if not report.levels:
        raise IngestionError(f"Report {report_path} contains no level sections")
    check_artifacts(report)
    out = out or os.path.dirname(os.path.abspath(report_path))
    os.makedirs(out, exist_ok=True)
    h = report.config_hash

    files = {"summary": os.path.join(out, "summary.txt")}
    with open(files["summary"], "w", encoding="utf-8") as handle:
        handle.write(summary_text(report))

    files["moments"] = os.path.join(out, "moments.csv")
    rows = []
    for level in report.levels:
        for p, e in level.moments["sup_moments"].items():
            rows.append([level.n, f"sup_h^{p}", e["mean"], e["ci_low"], e["ci_high"]])
        v = level.moments.get("v_integral")
        if v is not None:
            rows.append([level.n, "int_v_sq", v["mean"], v["ci_low"], v["ci_high"]])
    _write_csv(files["moments"], h, ["n", "statistic", "mean", "ci_low", "ci_high"], rows)

    files["modulus_curves"] = os.path.join(out, "modulus_curves.csv")
    rows = []
    for level in report.levels:
        curve = level.tightness["modulus_curve"]
        rows.extend([level.n, d, w] for d, w in zip(curve["deltas"], curve["values"]))
    _write_csv(files["modulus_curves"], h, ["n", "delta", "modulus"], rows)

    files["aldous"] = os.path.join(out, "aldous.csv")
    rows = []
    for level in report.levels:
        table = level.tightness.get("aldous") or {"rows": []}
        for row in table["rows"]:
            rows.append([level.n, row["theta"], row["eta"], row["probability"], row["ci_low"], row["ci_high"],
                         row["sup_probability"]])
    _write_csv(files["aldous"], h, ["n", "theta", "eta", "probability", "ci_low", "ci_high", "sup_probability"],
               rows)

    files["audits"] = os.path.join(out, "audits.csv")
    rows = [["basis", r["rule"], r["valid"], r["message"]] for r in report.audits.get("basis", [])]
    rows += [["assumptions", r["rule"], r["valid"], r["message"]]
             for r in report.audits.get("assumptions", {}).get("rule_results", [])]
    rows += [["taylor", f"p={t['p']:g}", not t["refit"], f"c_p = {t['constant']:.6g}"]
             for t in report.audits.get("taylor", [])]
    for level in report.levels:
        rows += [[f"n={level.n}", f"energy seed={e['seed']}", "",
                  f"max continuous defect {e['max_continuous']:.3e}, max jump defect {e['max_jump']:.3e}"]
                 for e in level.energy]
        rows += [[f"n={level.n}", f"weak_form seed={w['seed']}", w["residual"] <= w["tolerance"],
                  f"residual {w['residual']:.3e}"] for w in level.weak_form]
    _write_csv(files["audits"], h, ["section", "rule", "valid", "message"], rows)

    logger.info(f"Report bundle for {report.name} written to {out}")
    return files
