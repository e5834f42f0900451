"""Experiment harness: re-timing accuracy of each method on synthetic cases.

Generates seeded ground-truth cases per clip duration, runs every requested
method on the identical cases, and aggregates the mean absolute error of the
recovered skip sequences, the duration error, and wall time per method.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .baselines import speednet_sweep, uniform_retime
from .errors import InvalidInputError
from .optimizer import RetimeConfig, optimize
from .synth import GroundTruthCase, make_duration_case

DEFAULT_DURATIONS = (20.0, 60.0, 180.0)
DEFAULT_CASES_PER_DURATION = 50
DEFAULT_FPS = 30
DEFAULT_METHODS = ("ours", "speednet_sweep", "uniform")
DEFAULT_DOUBLINGS = 2
DURATION_TOLERANCE = 0.01  # |sum(skips) - n| <= tolerance * n counts as controlled


def mae(predicted, actual) -> float:
    """Mean absolute error between two equally long skip sequences."""
    a = np.asarray(predicted, dtype=np.float64)
    b = np.asarray(actual, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidInputError("skip sequences must be 1-D and equally long")
    return float(np.abs(a - b).mean())


def _run_ours(case: GroundTruthCase, config: RetimeConfig) -> np.ndarray:
    return optimize(case.slowness, case.n, case.l, config).d_hat


def _run_uniform(case: GroundTruthCase, config: RetimeConfig) -> np.ndarray:
    return uniform_retime(case.n, case.l)


def _run_speednet_sweep(case: GroundTruthCase, config: RetimeConfig) -> np.ndarray:
    return speednet_sweep(case.slowness, case.n, case.l, case.skips, config)


METHODS = {
    "ours": _run_ours,
    "speednet_sweep": _run_speednet_sweep,
    "uniform": _run_uniform,
}


@dataclass(frozen=True)
class CaseResult:
    """One method applied to one synthetic case."""

    method: str
    duration_s: float
    case_index: int
    seed: int
    n: int
    l: int
    mae: float
    duration_error: float
    wall_time: float


@dataclass
class ExperimentReport:
    """Suite configuration echo plus per-case records and aggregates."""

    durations: tuple
    cases_per_duration: int
    fps: int
    methods: tuple
    seed: int
    doublings: int
    records: list = field(default_factory=list)

    def _select(self, method, duration_s):
        return [
            r for r in self.records
            if r.method == method and r.duration_s == duration_s
        ]

    def mean_mae(self, method, duration_s) -> float:
        chosen = self._select(method, duration_s)
        if not chosen:
            raise InvalidInputError(f"no records for {method} at {duration_s}s")
        return float(np.mean([r.mae for r in chosen]))

    def duration_violation_fraction(
        self, method, duration_s, tolerance=DURATION_TOLERANCE
    ) -> float:
        chosen = self._select(method, duration_s)
        if not chosen:
            raise InvalidInputError(f"no records for {method} at {duration_s}s")
        bad = [r for r in chosen if r.duration_error > tolerance * r.n]
        return len(bad) / len(chosen)

    def summary(self) -> dict:
        out = {}
        for method in self.methods:
            out[method] = {}
            for duration in self.durations:
                out[method][str(duration)] = {
                    "mean_mae": self.mean_mae(method, duration),
                    "mean_duration_error": float(
                        np.mean([r.duration_error for r in self._select(method, duration)])
                    ),
                    "duration_violation_fraction": self.duration_violation_fraction(
                        method, duration
                    ),
                    "mean_wall_time": float(
                        np.mean([r.wall_time for r in self._select(method, duration)])
                    ),
                }
        return out

    def to_dict(self) -> dict:
        return {
            "config": {
                "durations": list(self.durations),
                "cases_per_duration": self.cases_per_duration,
                "fps": self.fps,
                "methods": list(self.methods),
                "seed": self.seed,
                "doublings": self.doublings,
            },
            "summary": self.summary(),
            "records": [asdict(r) for r in self.records],
        }


def case_seed(suite_seed: int, duration_index: int, case_index: int) -> int:
    """Schedule-independent per-case seed derived from the suite seed."""
    seq = np.random.SeedSequence((suite_seed, duration_index, case_index))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def generate_cases(
    durations, cases_per_duration, fps, seed, doublings=DEFAULT_DOUBLINGS
):
    """The synthetic cases of a suite, grouped per duration."""
    grouped = []
    for duration_index, seconds in enumerate(durations):
        group = [
            make_duration_case(
                seconds, fps, doublings,
                seed=case_seed(seed, duration_index, case_index),
            )
            for case_index in range(cases_per_duration)
        ]
        grouped.append(group)
    return grouped


def evaluate_cases(cases_by_duration, durations, methods, config=None) -> list:
    """Run every method on every case; all methods see identical cases."""
    cfg = config if config is not None else RetimeConfig()
    records = []
    for seconds, group in zip(durations, cases_by_duration):
        for method in methods:
            runner = METHODS[method]
            for case_index, case in enumerate(group):
                start = time.perf_counter()
                estimate = runner(case, cfg)
                wall = time.perf_counter() - start
                records.append(
                    CaseResult(
                        method=method,
                        duration_s=float(seconds),
                        case_index=case_index,
                        seed=case.seed,
                        n=case.n,
                        l=case.l,
                        mae=mae(estimate, case.skips),
                        duration_error=float(abs(estimate.sum() - case.n)),
                        wall_time=wall,
                    )
                )
    return records


def run_suite(
    durations=DEFAULT_DURATIONS,
    cases_per_duration=DEFAULT_CASES_PER_DURATION,
    fps=DEFAULT_FPS,
    methods=DEFAULT_METHODS,
    seed=0,
    config=None,
    doublings=DEFAULT_DOUBLINGS,
) -> ExperimentReport:
    """Generate the synthetic suite and evaluate every method on it.

    Per-case seeds derive from (suite seed, duration index, case index), so
    the report is reproducible and independent of evaluation order.
    """
    durations = tuple(float(s) for s in durations)
    if not durations:
        raise InvalidInputError("need at least one clip duration")
    if cases_per_duration < 1:
        raise InvalidInputError("need at least one case per duration")
    methods = tuple(methods)
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise InvalidInputError(f"unknown methods: {', '.join(unknown)}")
    cases = generate_cases(durations, cases_per_duration, fps, seed, doublings)
    records = evaluate_cases(cases, durations, methods, config)
    return ExperimentReport(
        durations=durations,
        cases_per_duration=cases_per_duration,
        fps=fps,
        methods=methods,
        seed=seed,
        doublings=doublings,
        records=records,
    )
