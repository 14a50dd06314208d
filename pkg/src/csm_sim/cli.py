"""Command-line front end.

Three subcommands: ``run`` executes a scenario and emits a JSON report,
``verify`` measures every invariant residual against a tolerance, and
``sweep`` grids one parameter and emits a CSV table.  Exit codes: 0 on
success, 1 on verification or execution failure, 2 on usage or parse
errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .errors import CsmSimError, ScenarioParseError, ScenarioValidationError
from .runner import (
    format_csv,
    report_to_json,
    run_scenario,
    sweep_rows,
    sweep_table,
    verify_report,
)
from .scenario import parse_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csm-sim",
        description="Scenario-driven simulator of context-to-context measurement statistics.",
    )
    parser.add_argument("--version", action="version", version=f"csm-sim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario and emit a JSON report")
    run_p.add_argument("scenario", help="path to a scenario file")
    run_p.add_argument("--seed", type=int, default=0, help="ensemble seed (default 0)")
    run_p.add_argument(
        "--trajectories", type=int, default=10_000, help="Monte Carlo sample count"
    )
    run_p.add_argument(
        "--exhaustive",
        action="store_true",
        help="enumerate every path exactly instead of sampling",
    )
    run_p.add_argument("--out", help="write the report here instead of stdout")

    verify_p = sub.add_parser("verify", help="check every invariant at a tolerance")
    verify_p.add_argument("scenario", help="path to a scenario file")
    verify_p.add_argument(
        "--tolerance", type=float, default=1e-10, help="residual tolerance (default 1e-10)"
    )
    verify_p.add_argument("--out", help="also write the verification report here")

    sweep_p = sub.add_parser("sweep", help="grid one parameter and emit a CSV table")
    sweep_p.add_argument("scenario", help="path to a scenario file")
    sweep_p.add_argument(
        "--param", required=True, choices=["g", "m_count", "phase"], help="parameter to sweep"
    )
    sweep_p.add_argument("--from", dest="start", type=float, required=True, help="first value")
    sweep_p.add_argument("--to", dest="stop", type=float, required=True, help="last value")
    sweep_p.add_argument("--steps", type=int, required=True, help="number of grid points")
    sweep_p.add_argument("--out", help="write the CSV here instead of stdout")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_run(args, scenario) -> int:
    if not args.exhaustive and args.trajectories < 1:
        print("run: --trajectories must be >= 1 unless --exhaustive is set", file=sys.stderr)
        return 2
    report = run_scenario(
        scenario, seed=args.seed, n_samples=args.trajectories, exhaustive=args.exhaustive
    )
    _emit(report_to_json(report), args.out)
    return 0


def _cmd_verify(args, scenario) -> int:
    report = verify_report(scenario, args.tolerance)
    for check in report["checks"]:
        status = "PASS" if check["pass"] else "FAIL"
        print(f"{status}  {check['name']}  residual={check['residual']:.3e}")
    if args.out:
        _emit(report_to_json(report), args.out)
    if not report["pass"]:
        first = next(c for c in report["checks"] if not c["pass"])
        print(
            f"verification failed: {first['name']} residual {first['residual']:.3e} "
            f"exceeds tolerance {args.tolerance:.3e}",
            file=sys.stderr,
        )
        return 1
    print(f"all {len(report['checks'])} checks passed at tolerance {args.tolerance:.3e}")
    return 0


def _cmd_sweep(args, scenario) -> int:
    if args.steps < 1:
        print("sweep: --steps must be >= 1", file=sys.stderr)
        return 2
    values = np.linspace(args.start, args.stop, args.steps)
    if args.param == "m_count":
        values = [int(round(v)) for v in values]
    rows = sweep_rows(scenario, args.param, values)
    header, table = sweep_table(args.param, rows, scenario.dim)
    _emit(format_csv(header, table), args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        scenario = parse_scenario(args.scenario)
    except FileNotFoundError:
        print(f"{args.scenario}: file not found", file=sys.stderr)
        return 2
    except (ScenarioParseError, ScenarioValidationError) as err:
        print(f"{args.scenario}: {err}", file=sys.stderr)
        return 2
    try:
        if args.command == "run":
            return _cmd_run(args, scenario)
        if args.command == "verify":
            return _cmd_verify(args, scenario)
        return _cmd_sweep(args, scenario)
    except CsmSimError as err:
        print(f"{args.scenario}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
