"""Skip-sequence optimization for duration-exact video re-timing.

Finds real-valued frame skips d = [d_1, ..., d_l] whose running sums give the
source positions of the output frames.  A weighted penalty objective couples
four terms: cover the whole source (quadratic in the skip total), never slow
down (hinge below skip 1), change speed smoothly (squared differences), and
stay consistent with per-frame slowness probabilities or a re-timing signal
read at the running positions themselves.  Descent uses Adam with exact
gradients, including the path through the positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import DegenerateSignalError, InvalidInputError, InvalidTargetError
from .signals import (
    DEFAULT_GAP_THRESHOLD,
    ZERO_SLOW,
    RetimeSignal,
    SlownessMatrix,
    sharpen,
)

SKIP_FLOOR = 0.1  # projection floor keeping positions strictly increasing

INDEX_GRADIENT_FULL = "full"
INDEX_GRADIENT_STOP = "stop"

AUTO = "auto"

_EMPTY = np.empty(0)
_EMPTY_MATRIX = np.empty((0, 1))


@dataclass
class RetimeConfig:
    """Weights and Adam settings for the skip optimization.

    ``lambda_signal_strength`` scales how far the signal lifts the per-frame
    speed-up bound; "auto" derives it from the duration reduction rate and
    the signal mean.  ``index_gradient`` chooses whether gradients flow
    through the interpolation positions ("full") or treat them as constant
    ("stop").
    """

    lambda_sum: float = 1.0
    lambda_min: float = 10.0
    lambda_smooth: float = 1.0
    lambda_signal_strength: float | str = AUTO
    learning_rate: float = 0.05
    steps: int = 2000
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    gap_threshold: float = DEFAULT_GAP_THRESHOLD
    index_gradient: str = INDEX_GRADIENT_FULL

    def __post_init__(self):
        for name in ("lambda_sum", "lambda_min", "lambda_smooth"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0.0:
                raise InvalidInputError(f"{name} must be finite and non-negative")
        if self.lambda_signal_strength != AUTO:
            strength = float(self.lambda_signal_strength)
            if not np.isfinite(strength) or strength <= 0.0:
                raise InvalidInputError("signal strength must be positive or 'auto'")
            self.lambda_signal_strength = strength
        if self.learning_rate <= 0.0:
            raise InvalidInputError("learning rate must be positive")
        if self.steps < 1:
            raise InvalidInputError("need at least one optimization step")
        if self.index_gradient not in (INDEX_GRADIENT_FULL, INDEX_GRADIENT_STOP):
            raise InvalidInputError(
                f"index gradient must be 'full' or 'stop', got {self.index_gradient!r}"
            )
        if not 0.0 < self.gap_threshold < 1.0:
            raise InvalidInputError("gap threshold must lie strictly between 0 and 1")


@dataclass
class RetimeResult:
    """Optimized skips with the derived frame indices and loss history.

    ``nu`` holds the continuous source positions [0, d_1, d_1+d_2, ...];
    ``loss_trace`` has one entry per step plus the final loss;
    ``term_values`` holds the unweighted final value of each loss term.
    """

    d_hat: np.ndarray
    nu: np.ndarray
    frame_indices: np.ndarray
    loss_trace: np.ndarray
    term_values: dict = field(default_factory=dict)
    duration_error: float = 0.0


def _as_skips(skips) -> np.ndarray:
    arr = np.ascontiguousarray(skips, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise InvalidInputError("skip sequence must be 1-D with length >= 2")
    if not np.isfinite(arr).all():
        raise InvalidInputError("skip sequence contains non-finite values")
    return arr


def loss_sum(skips, source_frames) -> float:
    """Squared mismatch between the skip total and the source frame count."""
    d = _as_skips(skips)
    resid = d.sum() - source_frames
    return float(resid * resid)


def loss_min(skips) -> float:
    """Hinge penalty on skips below 1, i.e. on slowed-down frames."""
    d = _as_skips(skips)
    return float(np.maximum(0.0, 1.0 - d).sum())


def loss_smooth(skips) -> float:
    """Sum of squared consecutive skip differences."""
    d = _as_skips(skips)
    steps = np.diff(d)
    return float(steps @ steps)


def _position_interp(table: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Rows of ``table`` linearly interpolated at clamped real positions."""
    rows = table.shape[0]
    xc = np.clip(positions, 0.0, rows - 1.0)
    lo = np.minimum(np.floor(xc).astype(np.intp), rows - 2)
    w = xc - lo
    return table[lo] + w[:, None] * (table[lo + 1] - table[lo])


def loss_speediness(skips, slowness: SlownessMatrix, source_frames) -> float:
    """Penalty on skips exceeding the slowness-weighted admissible speed-ups.

    Skip q is scored against the class probabilities interpolated at the last
    gap it crosses (a slowness row describes the gap between a frame and its
    successor, so a landing at running position nu reads row nu - 1).  The
    check thereby follows the subsampling itself rather than fixed source
    frames.  ``source_frames`` documents the video the skips cover; the term
    itself only needs the matrix rows.
    """
    d = _as_skips(skips)
    if slowness.rows < 2:
        raise InvalidInputError("slowness matrix needs at least 2 rows here")
    positions = np.cumsum(d)[:-1]
    probs = _position_interp(slowness.probs, positions - 1.0)
    active = np.maximum(0.0, d[:-1, None] - slowness.class_skips()[None, :])
    return float((probs * active * active).sum())


def loss_signal(skips, signal: RetimeSignal, strength) -> float:
    """Penalty on skips exceeding 1 + strength * signal at their position."""
    d = _as_skips(skips)
    if signal.orientation != ZERO_SLOW:
        raise InvalidInputError("signal loss expects zero-means-no-speed-up orientation")
    if strength <= 0.0:
        raise InvalidInputError("signal strength must be positive")
    values = signal.normalized
    if values.size < 2:
        raise InvalidInputError("signal must have at least 2 samples")
    positions = np.cumsum(d)[:-1]
    bound = _position_interp(values[:, None], positions)[:, 0]
    active = np.maximum(0.0, d[:-1] - strength * bound - 1.0)
    return float(active @ active)


def default_lambda(source_frames, target_frames, signal: RetimeSignal) -> float:
    """Signal strength scaled inversely to the signal mean and reduction rate."""
    mean = float(signal.normalized.mean())
    if mean <= 0.0:
        raise DegenerateSignalError(
            "signal permits no speed-up anywhere; use a different signal or a "
            "uniform re-timing"
        )
    return (source_frames / target_frames) / mean


def _resolve_source(source, skips_len, source_frames, config):
    """Map a slowness matrix or signal onto kernel arguments."""
    if isinstance(source, SlownessMatrix):
        if source.rows < 2:
            raise InvalidInputError("slowness matrix needs at least 2 rows")
        return 0, source.probs, _EMPTY, 0.0
    if isinstance(source, RetimeSignal):
        canonical = source.as_zero_slow()
        if len(canonical) < 2:
            raise InvalidInputError("signal must have at least 2 samples")
        strength = config.lambda_signal_strength
        if strength == AUTO:
            strength = default_lambda(source_frames, skips_len, canonical)
        return 1, _EMPTY_MATRIX, canonical.normalized, float(strength)
    raise InvalidInputError(
        f"expected a SlownessMatrix or RetimeSignal, got {type(source).__name__}"
    )


def total_loss_and_gradient(skips, source, source_frames, config=None):
    """Full objective value and its exact gradient with respect to the skips.

    ``source`` is a SlownessMatrix or a RetimeSignal; in signal mode the
    slowness term is replaced by the signal term.  The gradient includes the
    path through the running positions unless the config says "stop".
    """
    d = _as_skips(skips)
    cfg = config if config is not None else RetimeConfig()
    mode, probs, sig, strength = _resolve_source(source, d.size, source_frames, cfg)
    total, grad = kernels.skip_loss_grad(
        d, probs, sig, mode, strength, float(source_frames),
        cfg.lambda_sum, cfg.lambda_min, cfg.lambda_smooth,
        cfg.index_gradient == INDEX_GRADIENT_FULL,
    )[:2]
    return float(total), grad


def optimize(source, source_frames, target_frames, config=None) -> RetimeResult:
    """Optimize the frame subsampling to hit the target duration.

    Starts from the uniform skip ``source_frames / target_frames`` and runs
    Adam on the penalty objective, projecting every skip onto the floor 0.1
    after each step so positions stay strictly increasing.  In slowness mode
    the matrix is confidence-sharpened once up front.
    """
    n = int(source_frames)
    l = int(target_frames)
    if l < 2:
        raise InvalidInputError("need at least two output frames")
    if l >= n:
        raise InvalidTargetError(
            f"target of {l} frames must be shorter than the source of {n} frames"
        )
    cfg = config if config is not None else RetimeConfig()
    if isinstance(source, SlownessMatrix):
        source = sharpen(source, cfg.gap_threshold)
    mode, probs, sig, strength = _resolve_source(source, l, n, cfg)
    d0 = np.full(l, n / l)
    d_hat, trace = kernels.optimize_skips(
        d0, probs, sig, mode, strength, float(n),
        cfg.lambda_sum, cfg.lambda_min, cfg.lambda_smooth,
        cfg.index_gradient == INDEX_GRADIENT_FULL,
        cfg.steps, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
        cfg.adam_epsilon, SKIP_FLOOR,
    )
    total, _, term_data, term_sum, term_min, term_smooth = kernels.skip_loss_grad(
        d_hat, probs, sig, mode, strength, float(n),
        cfg.lambda_sum, cfg.lambda_min, cfg.lambda_smooth,
        cfg.index_gradient == INDEX_GRADIENT_FULL,
    )
    data_key = "speediness" if mode == 0 else "signal"
    nu = np.concatenate(([0.0], np.cumsum(d_hat)))
    assert (np.diff(nu) > 0).all(), "floor projection must keep positions increasing"
    return RetimeResult(
        d_hat=d_hat,
        nu=nu,
        frame_indices=to_frame_indices(nu, n),
        loss_trace=np.append(trace, total),
        term_values={
            data_key: float(term_data),
            "sum": float(term_sum),
            "min": float(term_min),
            "smooth": float(term_smooth),
        },
        duration_error=float(abs(nu[-1] - n)),
    )


def to_frame_indices(positions, source_frames) -> np.ndarray:
    """Round continuous positions to usable frame indices.

    Half-up rounding, clamped to [0, source_frames - 1], then forced
    non-decreasing by a forward maximum.
    """
    pos = np.asarray(positions, dtype=np.float64)
    if pos.ndim != 1 or pos.size == 0:
        raise InvalidInputError("positions must form a non-empty 1-D sequence")
    if (np.diff(pos) < 0).any():
        raise InvalidInputError("positions must be non-decreasing")
    idx = np.floor(pos + 0.5).astype(np.int64)
    np.clip(idx, 0, int(source_frames) - 1, out=idx)
    return np.maximum.accumulate(idx)
