"""Command-line entry point.

Exit status: 0 on success, 1 when an input fails to load or validate,
2 on usage errors. Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .decision import LowLevelThresholds
from .effort import EfMode
from .manifest import ActualsError, ManifestError, load_actuals, load_manifest, parse_manifest, parse_actuals
from .metrics import (
    Estimator,
    InvalidLogError,
    compute_completion_score,
    compute_mpph,
    compute_success_metrics,
    tally_failures,
    tally_trials,
    validate_trial_log,
)
from .report import (
    FORMATS,
    CalibrationError,
    bench_report_data,
    calibrate,
    emit_assess_report,
    emit_bench_report,
    emit_calibration_report,
    emit_plan_report,
)
from .simulator import simulate_trials
from .triallog import TrialLogError, load_sim_config, load_trial_log, parse_sim_config, write_simulated_log

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class _InputError(Exception):
    """Raised for unreadable or invalid input files; maps to exit status 1."""


def _thresholds(text: str) -> LowLevelThresholds:
    try:
        lo, hi = (float(x) for x in text.split(","))
        return LowLevelThresholds(lo, hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected <direct>,<reimpl> with 0 < direct < reimpl <= 1 ({exc})")


def _u64(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64)")
    return v


def _nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=FORMATS, default="text", help="report format (default: text)")

    plan_opts = argparse.ArgumentParser(add_help=False)
    plan_opts.add_argument(
        "--ef-mode", choices=[m.value for m in EfMode], default=None,
        help="effort coefficient mode; defaults to the manifest's ef_mode",
    )
    plan_opts.add_argument(
        "--thresholds", type=_thresholds, default=None, metavar="DIRECT,REIMPL",
        help="low-level decision thresholds, e.g. 0.15,0.55",
    )

    parser = argparse.ArgumentParser(
        prog="robointegrate",
        description="Integration effort assessment and pick-and-place benchmark metrics.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("assess", parents=[fmt, plan_opts], help="effort coefficient per component")
    p.add_argument("manifest")

    p = sub.add_parser("plan", parents=[fmt, plan_opts], help="full integration plan report")
    p.add_argument("manifest")

    p = sub.add_parser("calibrate", parents=[fmt, plan_opts], help="predicted vs actual integration time")
    p.add_argument("manifest")
    p.add_argument("actuals")
    p.add_argument("--slack", type=_nonneg, default=0.0, help="days of slack around each range (default 0)")

    p = sub.add_parser("bench", parents=[fmt], help="benchmark metrics and failure tallies from a trial log")
    p.add_argument("triallog")
    p.add_argument(
        "--estimator", choices=[e.value for e in Estimator], default=Estimator.MEAN_OF_RATIOS.value,
        help="aggregation across trials (default: mean-of-ratios)",
    )

    p = sub.add_parser("simulate", help="generate a synthetic trial log")
    p.add_argument("simconfig")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--trials", type=_positive_int, default=10)
    p.add_argument("-o", "--output", default=None, help="output path (default: stdout)")

    p = sub.add_parser("validate", help="validate a manifest, sim config, trial log or actuals file")
    p.add_argument("file")
    return parser


def _manifest(args: argparse.Namespace):
    try:
        m = load_manifest(args.manifest)
    except FileNotFoundError as exc:
        raise _InputError(str(exc)) from None
    except ManifestError as exc:
        raise _InputError("\n".join([f"{args.manifest}: invalid manifest"] + [f"  {v}" for v in exc.violations])) from None
    if args.thresholds is not None:
        m = replace(m, thresholds=args.thresholds)
    if args.ef_mode is not None:
        m = replace(m, ef_mode=EfMode(args.ef_mode))
    return m


def _cmd_assess(args, out) -> int:
    out.write(emit_assess_report(_manifest(args), args.format))
    return EXIT_OK


def _cmd_plan(args, out) -> int:
    out.write(emit_plan_report(_manifest(args), args.format))
    return EXIT_OK


def _cmd_calibrate(args, out) -> int:
    manifest = _manifest(args)
    try:
        actuals = load_actuals(args.actuals)
        report = calibrate(manifest, actuals, args.slack)
    except FileNotFoundError as exc:
        raise _InputError(str(exc)) from None
    except (ActualsError, CalibrationError) as exc:
        raise _InputError(f"{args.actuals}: {exc}") from None
    out.write(emit_calibration_report(report, args.format))
    return EXIT_OK


def _cmd_bench(args, out) -> int:
    try:
        log = load_trial_log(args.triallog)
        tallies = tally_trials(log.attempts, log.trials, log.config)
    except FileNotFoundError as exc:
        raise _InputError(str(exc)) from None
    except (TrialLogError, InvalidLogError) as exc:
        raise _InputError("\n".join([f"{args.triallog}: invalid trial log"] + [f"  {v}" for v in exc.violations])) from None
    if not log.trials:
        raise _InputError(f"{args.triallog}: no trial records")
    estimator = Estimator(args.estimator)
    data = bench_report_data(
        log.config,
        compute_success_metrics(tallies, log.config, estimator),
        compute_completion_score(tallies, log.config),
        compute_mpph(tallies, log.trials),
        tally_failures(log.attempts, log.config),
        len(log.trials),
    )
    if log.config_inferred:
        print(f"{args.triallog}: no config record; hands and tools inferred from records", file=sys.stderr)
    out.write(emit_bench_report(data, args.format))
    return EXIT_OK


def _cmd_simulate(args, out) -> int:
    try:
        config = load_sim_config(args.simconfig)
    except FileNotFoundError as exc:
        raise _InputError(str(exc)) from None
    except ValueError as exc:
        raise _InputError(f"{args.simconfig}: {exc}") from None
    log = simulate_trials(config, args.seed, args.trials)
    buf = io.StringIO()
    write_simulated_log(buf, log)
    if args.output:
        Path(args.output).write_text(buf.getvalue(), encoding="utf-8")
    else:
        out.write(buf.getvalue())
    return EXIT_OK


def _validate_file(path: Path) -> list[str]:
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise _InputError(f"file not found: {path}") from None

    if path.suffix == ".jsonl":
        try:
            log = load_trial_log(path)
        except TrialLogError as exc:
            return exc.violations
        return validate_trial_log(log.attempts, log.trials, log.config)
    if path.suffix == ".csv":
        try:
            parse_actuals(text)
        except ActualsError as exc:
            return exc.violations
        return []
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        return [f"line {exc.lineno} column {exc.colno}: malformed JSON: {exc.msg}"]
    if isinstance(data, dict) and "components" in data:
        try:
            parse_manifest(data, str(path))
        except ManifestError as exc:
            return exc.violations
        return []
    try:
        parse_sim_config(data)
    except (ValueError, KeyError, TypeError) as exc:
        return [f"sim config: {exc}"]
    return []


def _cmd_validate(args, out) -> int:
    path = Path(args.file)
    problems = _validate_file(path)
    if problems:
        print(f"{path}: {len(problems)} problem(s)", file=sys.stderr)
        for v in problems:
            print(f"  {v}", file=sys.stderr)
        return EXIT_INVALID
    out.write(f"{path}: valid\n")
    return EXIT_OK


_COMMANDS = {
    "assess": _cmd_assess,
    "plan": _cmd_plan,
    "calibrate": _cmd_calibrate,
    "bench": _cmd_bench,
    "simulate": _cmd_simulate,
    "validate": _cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args, out)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
