"""Command-line entry point: ``flowgen generate`` and ``flowgen validate``.

Exit codes: 0 success or validation pass, 1 runtime failure or validation
fail, 2 usage or configuration error. Progress goes to stderr, the machine
readable summary to stdout.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from pathlib import Path

from .config import ConfigError, resolve_config
from .generate import CHUNK_USERS, generate
from .validate import REPORT_NAME, DatasetError, Thresholds, validate_dataset


def _iso_date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO date (YYYY-MM-DD): {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowgen", description="Synthetic workplace well-being panel generator.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="simulate a population and write the CSV tables")
    gen.add_argument("--config", type=Path, help="JSON config file; omitted keys keep their defaults")
    gen.add_argument("--seed", type=_seed, help="master seed (overrides FLOW_SEED and the config file)")
    gen.add_argument("--users", type=_positive_int, help="population size")
    gen.add_argument("--start", type=_iso_date, help="first simulated date")
    gen.add_argument("--end", type=_iso_date, help="last simulated date (inclusive)")
    gen.add_argument("--out", type=Path, default=Path("flow_output"), help="output directory (default: %(default)s)")
    gen.add_argument("--threads", type=_positive_int, default=1, help="worker processes (default: 1)")
    gen.add_argument("--chunk-users", type=_positive_int, default=CHUNK_USERS, help=argparse.SUPPRESS)
    gen.add_argument("--no-denormalized", action="store_true", help="skip daily_all.csv")
    gen.add_argument("--quiet", action="store_true", help="no progress messages")

    val = sub.add_parser("validate", help="run the sanity-check suite on a dataset directory")
    val.add_argument("--dir", type=Path, required=True, help="dataset directory")
    val.add_argument("--report", type=Path, help=f"report path (default: DIR/{REPORT_NAME})")
    d = Thresholds()
    val.add_argument("--min-corr-work-stress", type=float, default=d.min_corr_workload_stress)
    val.add_argument("--max-corr-stress-sleep", type=float, default=d.max_corr_stress_sleep)
    val.add_argument("--max-corr-stress-mood", type=float, default=d.max_corr_stress_mood)
    val.add_argument("--min-corr-exercise-mood", type=float, default=d.min_corr_exercise_mood)
    val.add_argument("--sleep-mean-min", type=float, default=d.sleep_mean_range[0])
    val.add_argument("--sleep-mean-max", type=float, default=d.sleep_mean_range[1])
    val.add_argument("--max-weight-change", type=float, default=d.max_daily_weight_change)
    val.add_argument("--min-stress-autocorr", type=float, default=d.min_median_stress_autocorr)
    val.add_argument("--min-user-stress-sd", type=float, default=d.min_user_stress_sd)
    val.add_argument("--min-vacation-above-mean", type=float, default=d.min_vacation_above_mean)
    val.add_argument("--weight-tolerance", type=float, default=d.weight_tolerance)
    return parser


def run_generate(args: argparse.Namespace) -> int:
    try:
        config = resolve_config(
            args.config,
            seed=args.seed,
            population_size=args.users,
            start_date=args.start,
            end_date=args.end,
            emit_denormalized=False if args.no_denormalized else None,
        )
    except ConfigError as exc:
        print(f"flowgen: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"flowgen: cannot read config: {exc}", file=sys.stderr)
        return 2

    def progress(msg: str) -> None:
        if not args.quiet:
            print(msg, file=sys.stderr, flush=True)

    try:
        summary = generate(config, args.out, threads=args.threads, chunk_users=args.chunk_users, progress=progress)
    except OSError as exc:
        print(f"flowgen: write failed: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(summary.as_dict(), indent=2))
    return 0


def run_validate(args: argparse.Namespace) -> int:
    thresholds = Thresholds(
        min_corr_workload_stress=args.min_corr_work_stress,
        max_corr_stress_sleep=args.max_corr_stress_sleep,
        max_corr_stress_mood=args.max_corr_stress_mood,
        min_corr_exercise_mood=args.min_corr_exercise_mood,
        sleep_mean_range=(args.sleep_mean_min, args.sleep_mean_max),
        max_daily_weight_change=args.max_weight_change,
        min_median_stress_autocorr=args.min_stress_autocorr,
        min_user_stress_sd=args.min_user_stress_sd,
        min_vacation_above_mean=args.min_vacation_above_mean,
        weight_tolerance=args.weight_tolerance,
    )
    try:
        report = validate_dataset(args.dir, thresholds)
        report.write(args.report or args.dir / REPORT_NAME)
    except DatasetError as exc:
        print(f"flowgen: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"flowgen: {exc}", file=sys.stderr)
        return 1
    print(report.summary())
    return 0 if report.passed else 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "generate":
        return run_generate(args)
    return run_validate(args)


if __name__ == "__main__":
    sys.exit(main())
