"""
Entropic Uncertainty Lab - Command Line Entry Point
Parses subcommands, runs the experiment and writes tables, manifests and plots
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from loguru import logger

from cv_models.exceptions import LabError, RelationViolation
from cv_models.fock.states import FockDensity, FockVector
from uncertainty_lab.config import NumericsSettings, config
from uncertainty_lab.experiments import ExperimentResult, ExperimentRunner
from uncertainty_lab.utils.plotting import figure_for, save_svg
from uncertainty_lab.utils.report_writer import ReportWriter
from uncertainty_lab.utils.state_io import load_pairs, load_state

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>"
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INVALID = 2


def configure_logging(level: Optional[str] = None) -> None:
    """Replace the default sink with the lab's stdout format"""
    logger.remove()
    logger.add(sys.stdout, format=LOG_FORMAT, level=level or config.LOG_LEVEL)


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _add_shared_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--nmax", type=int, default=None, help=f"Fock truncation (default {config.NMAX})")
    parser.add_argument("--grid-points", type=int, default=None, help=f"Marginal grid points (default {config.GRID_POINTS})")
    parser.add_argument("--grid-extent", type=float, default=None, help="Multiplier on the default grid extent")
    parser.add_argument("--hbar", type=float, default=None, help=f"Action unit (default {config.HBAR})")
    parser.add_argument("--seed", type=int, default=42, help="Base random seed")
    parser.add_argument("--out", type=Path, default=Path(config.OUTPUT_DIR), help="Output directory")
    parser.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv", help="Table format")
    parser.add_argument("--plot", action="store_true", help="Write <command>.svg")
    parser.add_argument("--tol", type=float, default=None, help=f"Slack tolerance in nats (default {config.TOL})")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes for trials and restarts")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per experiment"""
    parser = argparse.ArgumentParser(
        prog="uncertainty_lab",
        description="Entropic and entropy-power uncertainty relations in a truncated Fock basis",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    passive = subparsers.add_parser("passive-scan", help="Extremal passive states N = 0..n")
    passive.add_argument("--max-photon", type=int, default=20)

    random_scan = subparsers.add_parser("random-scan", help="Haar-random states against the corrected bound")
    random_scan.add_argument("--trials", type=int, default=1000)
    random_scan.add_argument("--dim", type=int, default=4)

    neighborhood = subparsers.add_parser("neighborhood", help="Small non-Gaussian admixtures to a squeezed vacuum")
    neighborhood.add_argument("--s", type=float, default=1.5, help="Squeezing factor e^r")
    neighborhood.add_argument("--theta", type=float, default=float(np.pi / 4))
    neighborhood.add_argument("--eps", type=float, default=0.01)
    neighborhood.add_argument("--trials", type=int, default=500)
    neighborhood.add_argument("--neighbor-dim", type=int, default=4)
    neighborhood.add_argument("--reference", choices=("fock", "wavefunction"), default="fock")

    concavity = subparsers.add_parser("concavity", help="Concavity defect of the uncertainty functional")
    concavity.add_argument("--pairs-file", type=Path, default=None, help="JSON list of [state, state] pairs")
    concavity.add_argument("--lambdas", type=int, default=21, help="Number of mixing weights on [0, 1]")

    search = subparsers.add_parser("counterexample", help="Nelder-Mead search for a negative slack")
    search.add_argument("--dim", type=int, default=6)
    search.add_argument("--restarts", type=int, default=50)
    search.add_argument("--max-iter", type=int, default=2000)

    saturation = subparsers.add_parser("gaussian-saturation", help="Rotated squeezed vacua sweep")
    saturation.add_argument("--r-grid", type=_float_list, default=None, help="Comma-separated r values")
    saturation.add_argument("--theta-grid", type=_float_list, default=None, help="Comma-separated angles")
    saturation.add_argument("--eigencheck-nmax", type=int, default=80)

    check = subparsers.add_parser("check", help="Every relation for one state file")
    check.add_argument("state_file", type=Path)
    check.add_argument("--no-joint", action="store_true", help="Skip the Wigner-based joint relation")

    multimode = subparsers.add_parser("multimode", help="Gaussian n-mode closed forms and chain")
    multimode.add_argument("--r-grid", type=_float_list, default=None)
    multimode.add_argument("--trials", type=int, default=200)
    multimode.add_argument("--modes", type=int, default=4)

    subparsers.add_parser("hygiene", help="Entropy drift under grid and truncation refinement")

    for sub in subparsers.choices.values():
        _add_shared_flags(sub)
    return parser


def settings_from_args(args: argparse.Namespace) -> NumericsSettings:
    return config.numerics(
        nmax=args.nmax,
        grid_points=args.grid_points,
        grid_extent=args.grid_extent,
        hbar=args.hbar,
        tol=args.tol,
        workers=args.workers,
    )


def command_params(args: argparse.Namespace, settings: NumericsSettings) -> Dict[str, Any]:
    """Translate parsed flags into ExperimentRunner keyword arguments"""
    command = args.command
    if command == "passive-scan":
        return {"n_max_photon": args.max_photon}
    if command == "random-scan":
        return {"trials": args.trials, "dim": args.dim, "seed": args.seed}
    if command == "neighborhood":
        return {
            "s": args.s,
            "theta": args.theta,
            "eps": args.eps,
            "trials": args.trials,
            "seed": args.seed,
            "neighbor_dim": args.neighbor_dim,
            "reference": args.reference,
        }
    if command == "concavity":
        params: Dict[str, Any] = {"lambdas": np.linspace(0.0, 1.0, args.lambdas)}
        if args.pairs_file is not None:
            params["pairs"] = [(f"pair_{i}", a, b) for i, (a, b) in enumerate(load_pairs(args.pairs_file))]
        return params
    if command == "counterexample":
        return {"dim": args.dim, "restarts": args.restarts, "seed": args.seed, "max_iter": args.max_iter}
    if command == "gaussian-saturation":
        return {"r_grid": args.r_grid, "theta_grid": args.theta_grid, "eigencheck_nmax": args.eigencheck_nmax}
    if command == "check":
        state = load_state(args.state_file)
        if args.hbar is None and state.hbar != settings.hbar:
            logger.info(f"Using hbar={state.hbar} from the state file")
        return {"state": state, "include_joint": not args.no_joint}
    if command == "multimode":
        return {"r_grid": args.r_grid, "trials": args.trials, "modes": args.modes, "seed": args.seed}
    return {"seed": args.seed}


def write_outputs(result: ExperimentResult, writer: ReportWriter, settings: NumericsSettings, plot: bool) -> None:
    """Persist the table, manifest, optional report, replay states and figure"""
    command = result.command
    writer.write_table(command, result.table)
    writer.write_manifest(command, result.parameters, settings, result.summary, result.started, result.finished)
    if result.report is not None:
        writer.write_json(f"{command}_report", result.report)
    for name, state in result.states.items():
        writer.write_state(name, state)
    if plot:
        fig = figure_for(command, result.table)
        if fig is not None:
            save_svg(fig, writer.out_dir / f"{command}.svg")


def write_replay_state(writer: ReportWriter, command: str, state: Any) -> None:
    if isinstance(state, (FockVector, FockDensity)):
        path = writer.write_state(f"{command}_violation_state", state)
        logger.error(f"Offending state saved for replay: {path}")
    elif state is not None and hasattr(state, "gamma"):
        writer.write_json(f"{command}_violation_gamma", {"gamma": state.gamma, "hbar": state.hbar})


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point

    Args:
        argv: Arguments (defaults to sys.argv[1:])

    Returns:
        int: 0 on success, 1 on a relation violation, 2 on invalid input
    """
    args = build_parser().parse_args(argv)
    configure_logging()

    settings = settings_from_args(args)
    is_valid, problems = config.validate_config(settings)
    if not is_valid:
        logger.error(f"Invalid configuration: {'; '.join(problems)}")
        return EXIT_INVALID
    config.print_config_summary(settings)

    try:
        writer = ReportWriter(args.out, args.fmt)
    except ValueError as e:
        logger.error(str(e))
        return EXIT_INVALID

    try:
        params = command_params(args, settings)
        if args.command == "check":
            settings = settings.with_overrides(hbar=params["state"].hbar)
        result = ExperimentRunner(settings).run(args.command, **params)
        write_outputs(result, writer, settings, args.plot)
        result.raise_for_violations()
    except RelationViolation as e:
        logger.error(f"❌ {e}")
        write_replay_state(writer, args.command, e.state)
        return EXIT_VIOLATION
    except (LabError, ValueError) as e:
        logger.error(f"❌ Invalid input: {e}")
        return EXIT_INVALID

    logger.info(f"✅ Outputs written to {writer.out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
