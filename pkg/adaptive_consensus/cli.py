#!/usr/bin/env python3
"""
Adaptive consensus command-line interface.

Runs leader-following scenarios, checks leader excitation and evaluates the
acceptance checks.

Usage:
    adaptive-consensus simulate --builtin section5 --out run1/ --seed 42
    adaptive-consensus simulate --config scenario.yaml --out run1/ --T 20
    adaptive-consensus check-pe --builtin section5 --T0 6.283 --epsilon 0.1
    adaptive-consensus verify --builtin two-link-observer
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Callable

from . import __version__
from .config.loader import load_scenario
from .errors import format_error
from .exceptions import ConsensusError
from .models.excitation import leader_pe_report
from .simulation.builtin import BUILTIN_SCENARIOS, builtin_scenario
from .simulation.recorder import write_summary, write_trajectory
from .simulation.scenario import Scenario, scenario_with
from .verification.acceptance import format_check_table, verify_scenario

logger = logging.getLogger(__name__)

_LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _configure_logging(verbosity: int) -> None:
    level = _LOG_LEVELS[min(verbosity, len(_LOG_LEVELS) - 1)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _report(error: ConsensusError, prefix: str = "error") -> None:
    """One-line diagnostic on stderr; the JSON envelope goes to the DEBUG log."""
    location = ""
    if error.location:
        location = " (" + ", ".join(f"{k}={v}" for k, v in error.location.items()) + ")"
    print(
        f"{prefix} [{error.error_code.value}]: {error.message}{location}",
        file=sys.stderr,
    )
    if error.suggestion:
        print(f"  hint: {error.suggestion}", file=sys.stderr)
    logger.debug("%s", json.dumps(format_error(error.error), default=str))


def _load(args: argparse.Namespace) -> Scenario:
    """Resolve ``--config`` / ``--builtin`` and apply the overrides."""
    seed = getattr(args, "seed", None)
    if args.config is not None:
        scenario = load_scenario(args.config)
    else:
        scenario = builtin_scenario(args.builtin, 42 if seed is None else seed)
    return scenario_with(
        scenario,
        seed=seed,
        h=getattr(args, "h", None),
        T=getattr(args, "T", None),
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_simulate(args: argparse.Namespace) -> int:
    """Integrate the scenario and write the CSVs plus ``summary.json``."""
    try:
        scenario = _load(args)
        summary, trajectory = verify_scenario(scenario)
        written = write_trajectory(trajectory, args.out)
        written.append(write_summary(summary.to_dict(), args.out))
    except ConsensusError as exc:
        _report(exc)
        return 1
    except OSError as exc:
        print(f"error: cannot write to {args.out}: {exc}", file=sys.stderr)
        return 1

    print(
        f"Simulated {scenario.follower_count} followers for {scenario.integration.T:g} s "
        f"(h={scenario.integration.h:g}, seed={scenario.seed}); "
        f"wrote {len(written)} files to {args.out}; verdict {summary.verdict}"
    )
    return 0


def cmd_check_pe(args: argparse.Namespace) -> int:
    """Print the excitation report of the scenario's leader."""
    try:
        scenario = _load(args)
        report = leader_pe_report(
            scenario.leader,
            window=args.T0,
            offset=args.t0,
            epsilon=args.epsilon,
        )
    except ConsensusError as exc:
        _report(exc)
        return 1

    for key, value in report.to_dict().items():
        if isinstance(value, bool):
            text = str(value).lower()
        elif isinstance(value, float):
            text = f"{value:.6g}"
        else:
            text = str(value)
        print(f"{key}: {text}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the acceptance checks; exit 0 iff none fails."""
    try:
        scenario = _load(args)
        summary, _ = verify_scenario(scenario)
    except ConsensusError as exc:
        _report(exc, prefix="validation FAIL")
        return 1

    print(format_check_table(summary.checks))
    print(f"verdict: {summary.verdict}")
    if args.out is not None:
        write_summary(summary.to_dict(), args.out)
    return 0 if summary.passed else 1


# ---------------------------------------------------------------------------
# CLI entry point
# ---------------------------------------------------------------------------


def _add_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", help="Scenario file (.yaml, .json or .toml)")
    source.add_argument(
        "--builtin",
        choices=sorted(BUILTIN_SCENARIOS),
        help="Built-in scenario name",
    )


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="Override the scenario seed")
    parser.add_argument("--h", type=float, default=None, help="Override the integration step (s)")
    parser.add_argument("--T", type=float, default=None, help="Override the horizon (s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaptive-consensus",
        description="Adaptive leader-following consensus of Euler-Lagrange networks",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Increase log verbosity (-v info, -vv debug)",
    )
    subparsers = parser.add_subparsers(dest="subcommand", help="Command to run")

    # --- simulate ---
    sim_parser = subparsers.add_parser(
        "simulate", help="Run a scenario and write CSV trajectories"
    )
    _add_source(sim_parser)
    sim_parser.add_argument("--out", required=True, help="Output directory")
    _add_overrides(sim_parser)

    # --- check-pe ---
    pe_parser = subparsers.add_parser(
        "check-pe", help="Check persistent excitation of the leader"
    )
    _add_source(pe_parser)
    pe_parser.add_argument(
        "--T0",
        type=float,
        default=None,
        help="Excitation window length (default: one period of the slowest mode)",
    )
    pe_parser.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help="Gram lower bound (default: 0.1 x mean signal power)",
    )
    pe_parser.add_argument(
        "--t0", type=float, default=0.0, help="Start of the first window (default: 0)"
    )

    # --- verify ---
    ver_parser = subparsers.add_parser(
        "verify", help="Run a scenario and evaluate the acceptance checks"
    )
    _add_source(ver_parser)
    ver_parser.add_argument(
        "--out", default=None, help="Also write summary.json to this directory"
    )
    _add_overrides(ver_parser)

    return parser


def main(argv: list[str] | None = None) -> int:
    """Entry point for the adaptive-consensus CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.subcommand is None:
        parser.print_help()
        return 1

    _configure_logging(args.verbose)

    dispatch: dict[str, Callable[[argparse.Namespace], int]] = {
        "simulate": cmd_simulate,
        "check-pe": cmd_check_pe,
        "verify": cmd_verify,
    }
    return dispatch[args.subcommand](args)


if __name__ == "__main__":
    sys.exit(main())
