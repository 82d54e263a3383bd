"""Command-line entry point.

    donorsim run <config.yaml> [--seed N] [--out-dir D]
    donorsim validate <config.yaml>
    donorsim list-experiments

Exit codes: 0 success, 1 validation failure, 2 runtime failure,
3 estimator or fit non-convergence (results are still written).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import (
    EXPERIMENT_KINDS,
    build_config,
    load_mapping,
    validate_mapping,
)
from .runner import RunnerError, all_converged, run, write_records

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_NO_CONVERGENCE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="donorsim",
        description="Donor spin-qubit experiment simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one experiment config")
    run_p.add_argument("config", help="path to a YAML experiment config")
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    run_p.add_argument(
        "--out-dir", default=".", help="directory for result files (default: cwd)"
    )

    val_p = sub.add_parser("validate", help="check a config without running it")
    val_p.add_argument("config", help="path to a YAML experiment config")

    sub.add_parser("list-experiments", help="list known experiment kinds")
    return parser


def _load_and_validate(path: str, seed_override: int | None):
    """Returns (raw, report) or raises ValueError for unreadable files."""
    raw = load_mapping(path)
    if seed_override is not None:
        raw = {**raw, "seed": seed_override}
    return raw, validate_mapping(raw)


def _print_report(report) -> None:
    for error in report.errors:
        print(f"error: {error}", file=sys.stderr)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)


def _cmd_run(args) -> int:
    try:
        raw, report = _load_and_validate(args.config, args.seed)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _print_report(report)
    if not report.ok:
        return EXIT_VALIDATION

    config = build_config(raw, default_prefix=Path(args.config).stem)
    try:
        records = run(config)
        paths = write_records(
            records, args.out_dir, config.output_prefix, csv_curves=config.output_csv
        )
    except RunnerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    for path in paths:
        print(f"wrote {path}")
    for record in records:
        summary = _summary_line(record)
        print(f"{record.experiment_id}: {summary}" if summary else record.experiment_id)
    if not all_converged(records):
        print("error: one or more estimates did not converge", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


_SUMMARY_KEYS = (
    "cos_mixing_angle",
    "t2_star_us",
    "t2_us",
    "bell_fidelity",
    "concurrence",
    "max_abs_deviation_rad",
)


def _summary_line(record) -> str:
    parts = [
        f"{key}={record.scalars[key]:.6g}"
        for key in _SUMMARY_KEYS
        if key in record.scalars
    ]
    fidelities = {
        key[len("f_avg."):]: value
        for key, value in record.scalars.items()
        if key.startswith("f_avg.")
    }
    if fidelities:
        worst = min(fidelities, key=fidelities.get)
        parts.append(f"min f_avg={fidelities[worst]:.5f} ({worst})")
    if "converged" in record.scalars and not record.scalars["converged"]:
        parts.append("NOT CONVERGED")
    return ", ".join(parts)


def _cmd_validate(args) -> int:
    try:
        _, report = _load_and_validate(args.config, None)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _print_report(report)
    if report.ok:
        print("ok")
        return EXIT_OK
    return EXIT_VALIDATION


def _cmd_list(_args) -> int:
    width = max(len(kind) for kind in EXPERIMENT_KINDS)
    for kind, description in EXPERIMENT_KINDS.items():
        print(f"{kind:<{width}}  {description}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    command = {
        "run": _cmd_run,
        "validate": _cmd_validate,
        "list-experiments": _cmd_list,
    }[args.command]
    return command(args)


if __name__ == "__main__":
    sys.exit(main())
