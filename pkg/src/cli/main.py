"""
Command-line entry point: sns-levy validate | simulate | analyze | report
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from ..utils.config import config
from ..utils.errors import SnsError
from ..utils.logger import configure_app_logging
from .commands import cmd_analyze, cmd_report, cmd_simulate, cmd_validate, summary_text
from .models import ExperimentConfig

logger = logging.getLogger("sns_levy.cli")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sns-levy",
        description="Galerkin simulator and verification harness for stochastic Navier-Stokes with Levy noise",
    )
    parser.add_argument("--log-level", default=None, help="Override the configured log level")
    sub = parser.add_subparsers(dest="command", required=True)

    def experiment_command(name: str, help_text: str) -> argparse.ArgumentParser:
        command = sub.add_parser(name, help=help_text)
        command.add_argument("--config", required=True, help="Experiment YAML file")
        command.add_argument("--out", default=None, help="Output directory (default: <output root>/<name>)")
        command.add_argument("--seed", type=int, default=None, help="Override the base seed")
        command.add_argument("--level", type=int, default=None, help="Restrict to one Galerkin level")
        return command

    experiment_command("validate", "Audit the basis, noise assumptions and data")
    simulate = experiment_command("simulate", "Simulate and persist one ensemble per level")
    simulate.add_argument("--workers", type=int, default=None, help="Worker processes per ensemble")
    analyze = experiment_command("analyze", "Build the run report from persisted ensembles")
    analyze.add_argument("--ensemble-dir", default=None, help="Root written by simulate (default: --out)")

    report = sub.add_parser("report", help="Write summary.txt and the CSV bundle of a report")
    report.add_argument("--report", required=True, help="report.json written by analyze")
    report.add_argument("--out", default=None, help="Output directory (default: next to the report)")
    return parser


def output_directory(experiment: ExperimentConfig, out: Optional[str]) -> str:
    if out:
        return out
    if experiment.run.output_dir:
        return experiment.run.output_dir
    return os.path.join(config.output_root, experiment.name)


def load_experiment(args: argparse.Namespace) -> ExperimentConfig:
    experiment = ExperimentConfig.load(args.config)
    if args.seed is not None:
        experiment = experiment.with_seed(args.seed)
    return experiment


def run(args: argparse.Namespace) -> int:
    if args.command == "report":
        files = cmd_report(args.report, args.out)
        print(f"Wrote {', '.join(sorted(files.values()))}")
        return 0

    experiment = load_experiment(args)
    out = output_directory(experiment, args.out)
    logger.info(f"{args.command} {experiment.name} (config hash {experiment.config_hash()[:12]})")

    if args.command == "validate":
        summary = cmd_validate(experiment, out, level=args.level)
        print(f"Validation passed for levels {sorted(int(n) for n in summary['levels'])}")
    elif args.command == "simulate":
        result = cmd_simulate(experiment, out, workers=args.workers, level=args.level)
        print(f"Simulated levels {sorted(result['levels'])} into {out}")
    elif args.command == "analyze":
        report = cmd_analyze(experiment, args.ensemble_dir or out, level=args.level, out=out)
        print(summary_text(report), end="")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = build_parser().parse_args(argv)
    configure_app_logging(args.log_level)
    try:
        return run(args)
    except SnsError as e:
        logger.error(f"{args.command} failed: {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error in {args.command}: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
