"""Command-line interface.

Subcommands: ``retime`` (optimize a subsampling), ``synth`` (generate a
ground-truth case), ``eval`` (run the comparison suite), ``signal`` (build a
normalized re-timing signal).  Exit codes: 0 success, 2 invalid input,
3 infeasible target length.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fileio
from ._backend import active_backend
from .errors import InvalidTargetError, RetimeError
from .evaluation import (
    DEFAULT_CASES_PER_DURATION,
    DEFAULT_DURATIONS,
    DEFAULT_FPS,
    DEFAULT_METHODS,
    METHODS,
    ExperimentReport,
    evaluate_cases,
    run_suite,
)
from .optimizer import AUTO, RetimeConfig, default_lambda, optimize
from .signals import (
    DEFAULT_DOUBLINGS,
    DEFAULT_GAP_THRESHOLD,
    ZERO_SLOW,
    RetimeSignal,
    cosine_similarity_signal,
    interpolate_rows,
    normalize_signal,
    speediness_to_signal,
)
from .synth import make_duration_case


def _add_config_flags(parser):
    group = parser.add_argument_group("optimization")
    group.add_argument("--lambda-sum", type=float, default=1.0,
                       help="weight of the duration-cover term (default 1.0)")
    group.add_argument("--lambda-min", type=float, default=10.0,
                       help="weight of the no-slow-down term (default 10.0)")
    group.add_argument("--lambda-smooth", type=float, default=1.0,
                       help="weight of the smoothness term (default 1.0)")
    group.add_argument("--lambda", dest="signal_strength", default=AUTO,
                       help="signal strength multiplier or 'auto' (default auto)")
    group.add_argument("--learning-rate", type=float, default=0.05,
                       help="Adam learning rate (default 0.05)")
    group.add_argument("--steps", type=int, default=2000,
                       help="Adam iterations (default 2000)")
    group.add_argument("--adam-beta1", type=float, default=0.9,
                       help="Adam first-moment decay (default 0.9)")
    group.add_argument("--adam-beta2", type=float, default=0.999,
                       help="Adam second-moment decay (default 0.999)")
    group.add_argument("--adam-epsilon", type=float, default=1e-8,
                       help="Adam denominator offset (default 1e-8)")
    group.add_argument("--gap-threshold", type=float, default=DEFAULT_GAP_THRESHOLD,
                       help="confidence gap for slowness sharpening (default 0.975)")
    group.add_argument("--index-gradient", choices=("full", "stop"), default="full",
                       help="gradient through interpolation positions (default full)")


def _config_from_args(args) -> RetimeConfig:
    strength = args.signal_strength
    if strength != AUTO:
        strength = float(strength)
    return RetimeConfig(
        lambda_sum=args.lambda_sum,
        lambda_min=args.lambda_min,
        lambda_smooth=args.lambda_smooth,
        lambda_signal_strength=strength,
        learning_rate=args.learning_rate,
        steps=args.steps,
        adam_beta1=args.adam_beta1,
        adam_beta2=args.adam_beta2,
        adam_epsilon=args.adam_epsilon,
        gap_threshold=args.gap_threshold,
        index_gradient=args.index_gradient,
    )


def _write_json(path, payload) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_retime(args) -> int:
    n = args.source_frames
    l = args.target_frames
    config = _config_from_args(args)
    metadata = {"mode": args.mode, "backend": active_backend()}
    if args.mode == "speediness":
        if args.slowness is None:
            raise RetimeError("--slowness is required in speediness mode")
        slowness = fileio.load_slowness(args.slowness)
        if slowness.rows not in (n - 1, n):
            slowness = interpolate_rows(slowness, max(n - 1, 2))
        source = slowness
    else:
        if args.signal is None:
            raise RetimeError("--signal is required in signal mode")
        values, orientation = fileio.read_signal_csv(args.signal)
        signal = normalize_signal(values, orientation).as_zero_slow()
        if len(signal) not in (n - 1, n):
            grid = np.linspace(0.0, len(signal) - 1.0, max(n - 1, 2))
            resampled = np.interp(grid, np.arange(len(signal)), signal.normalized)
            signal = normalize_signal(resampled, ZERO_SLOW)
        if config.lambda_signal_strength == AUTO:
            config.lambda_signal_strength = default_lambda(n, l, signal)
        metadata["signal_strength"] = config.lambda_signal_strength
        source = signal
    result = optimize(source, n, l, config)
    _write_json(args.output, {
        "d": result.d_hat.tolist(),
        "nu": result.nu.tolist(),
        "frame_indices": result.frame_indices.tolist(),
        "duration_error": result.duration_error,
        "loss_trace": result.loss_trace.tolist(),
        "term_values": result.term_values,
        "metadata": metadata,
    })
    return 0


def cmd_synth(args) -> int:
    case = make_duration_case(
        args.duration_seconds, args.fps, args.doublings,
        seed=args.seed, sigma=args.sigma,
    )
    fileio.write_case_json(args.out_case, case)
    fileio.write_slowness_csv(args.out_slowness, case.slowness)
    return 0


def _eval_from_cases(args, config) -> ExperimentReport:
    cases = [fileio.read_case_json(path) for path in args.case_json]
    methods = tuple(args.methods.split(","))
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise RetimeError(f"unknown methods: {', '.join(unknown)}")
    durations = []
    grouped = []
    for case in cases:
        seconds = case.n / args.fps
        durations.append(seconds)
        grouped.append([case])
    records = evaluate_cases(grouped, durations, methods, config)
    return ExperimentReport(
        durations=tuple(durations),
        cases_per_duration=1,
        fps=args.fps,
        methods=methods,
        seed=-1,
        doublings=cases[0].k if cases else DEFAULT_DOUBLINGS,
        records=records,
    )


def cmd_eval(args) -> int:
    config = _config_from_args(args)
    if args.case_json:
        report = _eval_from_cases(args, config)
    else:
        if args.config is not None:
            try:
                suite = json.loads(Path(args.config).read_text())
            except OSError as exc:
                raise RetimeError(f"cannot read {args.config}: {exc}") from exc
            except ValueError as exc:
                raise RetimeError(f"{args.config} is not valid JSON: {exc}") from exc
            if not isinstance(suite, dict):
                raise RetimeError(f"{args.config} must hold a JSON object")
            durations = suite.get("durations", list(DEFAULT_DURATIONS))
            cases = suite.get("cases_per_duration", DEFAULT_CASES_PER_DURATION)
            fps = suite.get("fps", DEFAULT_FPS)
            methods = suite.get("methods", list(DEFAULT_METHODS))
            seed = suite.get("seed", 0)
        else:
            durations = [float(part) for part in args.durations.split(",")]
            cases = args.cases
            fps = args.fps
            methods = args.methods.split(",")
            seed = args.seed
        try:
            report = run_suite(durations, cases, fps, methods, seed, config)
        except (TypeError, ValueError) as exc:
            raise RetimeError(f"malformed suite configuration: {exc}") from exc
    fileio.write_report_json(args.out_report, report)
    if args.out_csv is not None:
        fileio.write_summary_csv(args.out_csv, report)
    return 0


def cmd_signal(args) -> int:
    if args.type == "cosine":
        if args.features is None:
            raise RetimeError("--features is required for the cosine signal")
        signal = cosine_similarity_signal(fileio.read_features_csv(args.features))
    else:
        if args.slowness is None:
            raise RetimeError("--slowness is required for the speediness signal")
        signal = speediness_to_signal(fileio.load_slowness(args.slowness))
    fileio.write_signal_csv(args.output, signal.normalized, signal.orientation)
    if not signal.normalized.any():
        print(
            f"warning: constant raw signal; normalized output in {args.output} "
            "is all zeros and permits no speed-up",
            file=sys.stderr,
        )
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retime",
        description="Duration-exact video frame re-timing tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_retime = sub.add_parser("retime", help="optimize a frame subsampling")
    p_retime.add_argument("--mode", choices=("speediness", "signal"),
                          default="speediness", help="objective data term")
    p_retime.add_argument("--slowness", help="slowness matrix CSV or JSON")
    p_retime.add_argument("--signal", help="re-timing signal CSV")
    p_retime.add_argument("--source-frames", type=int, required=True,
                          help="source video frame count")
    p_retime.add_argument("--target-frames", type=int, required=True,
                          help="output frame count (must be below the source count)")
    p_retime.add_argument("--output", default="-", help="result JSON path or - for stdout")
    _add_config_flags(p_retime)
    p_retime.set_defaults(func=cmd_retime)

    p_synth = sub.add_parser("synth", help="generate a synthetic ground-truth case")
    p_synth.add_argument("--duration-seconds", type=float, required=True,
                         help="clip duration to cover")
    p_synth.add_argument("--fps", type=int, default=DEFAULT_FPS,
                         help="frames per second (default 30)")
    p_synth.add_argument("--seed", type=int, required=True, help="case seed")
    p_synth.add_argument("--sigma", type=float, default=None,
                         help="speed-change probability; sampled per case when omitted")
    p_synth.add_argument("--doublings", type=int, default=DEFAULT_DOUBLINGS,
                         help="number of speed doublings (default 2)")
    p_synth.add_argument("--out-case", default="case.json", help="case JSON path")
    p_synth.add_argument("--out-slowness", default="slowness.csv",
                         help="slowness CSV path")
    p_synth.set_defaults(func=cmd_synth)

    p_eval = sub.add_parser("eval", help="run the method-comparison suite")
    p_eval.add_argument("--config", help="suite configuration JSON")
    p_eval.add_argument("--durations", default=",".join(f"{d:g}" for d in DEFAULT_DURATIONS),
                        help="comma-separated clip durations in seconds")
    p_eval.add_argument("--cases", type=int, default=DEFAULT_CASES_PER_DURATION,
                        help="cases per duration (default 50)")
    p_eval.add_argument("--fps", type=int, default=DEFAULT_FPS,
                        help="frames per second (default 30)")
    p_eval.add_argument("--methods", default=",".join(DEFAULT_METHODS),
                        help="comma-separated method names")
    p_eval.add_argument("--seed", type=int, default=0, help="suite seed")
    p_eval.add_argument("--case-json", action="append", default=[],
                        help="evaluate pre-generated case files instead of sampling")
    p_eval.add_argument("--out-report", default="report.json", help="report JSON path")
    p_eval.add_argument("--out-csv", default=None, help="optional summary CSV path")
    _add_config_flags(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_signal = sub.add_parser("signal", help="build a normalized re-timing signal")
    p_signal.add_argument("--type", choices=("cosine", "speediness"), required=True,
                          help="signal construction")
    p_signal.add_argument("--features", help="per-frame feature CSV (cosine)")
    p_signal.add_argument("--slowness", help="slowness CSV or JSON (speediness)")
    p_signal.add_argument("--output", default="signal.csv", help="signal CSV path")
    p_signal.set_defaults(func=cmd_signal)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidTargetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except RetimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())
