"""Reference re-timing methods used for comparison.

Uniform speed-up, and a reconstruction of the classic scheme that optimizes a
per-source-frame speed-up field toward a target average and only afterwards
integrates it into a subsampling.  The field is scored against slowness
probabilities at fixed source positions, in contrast to the optimizer module,
which follows the estimated subsampling itself.  The reconstruction follows
the published description of that scheme, not its original code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import InvalidInputError, InvalidTargetError
from .optimizer import SKIP_FLOOR, RetimeConfig
from .signals import SlownessMatrix

DEFAULT_LAMBDA_AVG = 10.0  # weight of the mean-speed-up target penalty
SWEEP_STEPS = 11           # sweep covers (n/l) * 1.05**t for t = 0..10


@dataclass(frozen=True)
class SweepDetail:
    """Instrumented sweep outcome: every candidate alongside the winner."""

    skips: np.ndarray
    targets: np.ndarray
    errors: np.ndarray
    best_index: int


def uniform_retime(source_frames, target_frames) -> np.ndarray:
    """The naive baseline: every skip equals source_frames / target_frames."""
    n = int(source_frames)
    l = int(target_frames)
    if l < 2:
        raise InvalidInputError("need at least two output frames")
    if l >= n:
        raise InvalidTargetError(
            f"target of {l} frames must be shorter than the source of {n} frames"
        )
    return np.full(l, n / l)


def speednet_retime(
    slowness: SlownessMatrix,
    source_frames,
    target_speedup,
    config: RetimeConfig | None = None,
    lambda_avg: float = DEFAULT_LAMBDA_AVG,
) -> np.ndarray:
    """Optimize a per-source-frame speed-up field, then integrate it.

    The field starts at the target value everywhere and descends a penalty
    objective (slowness hinge at fixed source rows + quadratic pull of the
    mean toward ``target_speedup`` + smoothness).  The integration walk then
    advances through the source by the local speed-up; returned skips are the
    consecutive differences of the visited positions, so their count is not
    fixed in advance.
    """
    if target_speedup < 1.0:
        raise InvalidInputError("target speed-up must be at least 1")
    cfg = config if config is not None else RetimeConfig()
    u0 = np.full(slowness.rows, float(target_speedup))
    u, _ = kernels.optimize_speedups(
        u0, slowness.probs, float(target_speedup), lambda_avg, cfg.lambda_smooth,
        cfg.steps, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
        cfg.adam_epsilon, SKIP_FLOOR,
    )
    positions = kernels.integrate_walk(u, float(source_frames))
    if positions.size < 2:
        return np.asarray([float(source_frames)])
    return np.diff(positions)


def integration_walk(speedups, source_frames) -> np.ndarray:
    """Source positions visited when walking by the local speed-up."""
    return kernels.integrate_walk(
        np.ascontiguousarray(speedups, dtype=np.float64), float(source_frames)
    )


def align_skip_count(skips, count: int) -> np.ndarray:
    """Truncate or pad (repeating the final value) to exactly ``count`` skips."""
    skips = np.asarray(skips, dtype=np.float64)
    if skips.size == 0:
        raise InvalidInputError("cannot align an empty skip sequence")
    if skips.size >= count:
        return skips[:count].copy()
    pad = np.full(count - skips.size, skips[-1])
    return np.concatenate([skips, pad])


def speednet_sweep(
    slowness: SlownessMatrix,
    source_frames,
    target_frames,
    ground_truth,
    config: RetimeConfig | None = None,
    lambda_avg: float = DEFAULT_LAMBDA_AVG,
    return_detail: bool = False,
):
    """Run the baseline over a geometric grid of target speed-ups.

    Because the integrated duration depends on how the speed-ups are laid
    out, no single target reliably lands on ``target_frames``; the sweep
    tries (n/l) * 1.05**t for t = 0..10, aligns each output to the target
    length, and keeps the candidate with the lowest mean absolute error
    against the ground-truth skips (oracle selection, evaluation only).
    """
    truth = np.asarray(ground_truth, dtype=np.float64)
    if truth.size != int(target_frames):
        raise InvalidInputError("ground truth must have one skip per target frame")
    base = source_frames / target_frames
    targets = base * 1.05 ** np.arange(SWEEP_STEPS)
    candidates = []
    errors = np.empty(SWEEP_STEPS)
    for t, target in enumerate(targets):
        skips = speednet_retime(slowness, source_frames, target, config, lambda_avg)
        aligned = align_skip_count(skips, int(target_frames))
        candidates.append(aligned)
        errors[t] = float(np.abs(aligned - truth).mean())
    best = int(np.argmin(errors))
    if return_detail:
        return SweepDetail(candidates[best], targets, errors, best)
    return candidates[best]
