"""Per-frame re-timing signals and slowness probability matrices.

A slowness matrix holds, for each between-frame position of a source video,
a probability distribution over discrete speed-up classes.  A re-timing
signal is an arbitrary per-frame scalar normalized to [0, 1].  Both feed the
skip optimizer in :mod:`retime.optimizer`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

PROB_EPSILON = 1e-12        # clamp applied to probabilities before log
ROW_SUM_TOLERANCE = 1e-6
SHARPEN_MAX_HALVINGS = 60   # exact ties can never be sharpened; stop here
DEFAULT_GAP_THRESHOLD = 0.975
DEFAULT_DOUBLINGS = 2

# Orientation tokens for re-timing signals.  "zero_slow": value 0 marks a
# frame that must keep its original speed.  "one_slow": value 1 marks it.
ZERO_SLOW = "zero_slow"
ONE_SLOW = "one_slow"
ORIENTATIONS = (ZERO_SLOW, ONE_SLOW)


def _readonly_f64(values, copy=True) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=copy, order="C")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SlownessMatrix:
    """Row-stochastic matrix of per-frame speed-up class probabilities.

    Column ``j`` holds the probability that the frame admits a speed-up of
    ``2**(k - j)``; column 0 is the slowest class (largest admissible skip)
    and the last column means "no speed-up".  ``k`` is the number of
    doublings, so there are ``k + 1`` classes.
    """

    probs: np.ndarray
    k: int = DEFAULT_DOUBLINGS

    def __post_init__(self):
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if probs.ndim != 2:
            raise InvalidInputError("slowness matrix must be 2-D")
        if self.k < 1:
            raise InvalidInputError(f"need at least one doubling, got k={self.k}")
        if probs.shape[1] != self.k + 1:
            raise InvalidInputError(
                f"expected {self.k + 1} classes for k={self.k}, got {probs.shape[1]}"
            )
        if probs.shape[0] < 1:
            raise InvalidInputError("slowness matrix needs at least one row")
        if not np.isfinite(probs).all():
            raise InvalidInputError("slowness matrix contains non-finite entries")
        if probs.min() < -1e-9 or probs.max() > 1.0 + 1e-9:
            raise InvalidInputError("slowness probabilities must lie in [0, 1]")
        row_sums = probs.sum(axis=1)
        if np.abs(row_sums - 1.0).max() > ROW_SUM_TOLERANCE:
            raise InvalidInputError("slowness rows must each sum to 1")
        probs = np.clip(probs, 0.0, 1.0)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def rows(self) -> int:
        return self.probs.shape[0]

    @property
    def classes(self) -> int:
        return self.probs.shape[1]

    def class_skips(self) -> np.ndarray:
        """Admissible skip per class: [2**k, ..., 2, 1]."""
        return 2.0 ** np.arange(self.k, -1, -1)


@dataclass(frozen=True)
class RetimeSignal:
    """A per-frame scalar signal together with its [0, 1]-normalized form."""

    raw: np.ndarray
    normalized: np.ndarray
    orientation: str = ZERO_SLOW

    def __post_init__(self):
        raw = _readonly_f64(self.raw)
        norm = _readonly_f64(self.normalized)
        if raw.ndim != 1 or norm.ndim != 1 or raw.size != norm.size:
            raise InvalidInputError("signal arrays must be 1-D and equally long")
        if norm.size and (norm.min() < -1e-12 or norm.max() > 1.0 + 1e-12):
            raise InvalidInputError("normalized signal must lie in [0, 1]")
        if self.orientation not in ORIENTATIONS:
            raise InvalidInputError(f"unknown orientation {self.orientation!r}")
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "normalized", _readonly_f64(np.clip(norm, 0.0, 1.0)))

    def __len__(self) -> int:
        return self.raw.size

    def flipped(self) -> "RetimeSignal":
        other = ONE_SLOW if self.orientation == ZERO_SLOW else ZERO_SLOW
        return RetimeSignal(self.raw, 1.0 - self.normalized, other)

    def as_zero_slow(self) -> "RetimeSignal":
        """Canonical orientation: 0 = frame keeps its original speed."""
        return self if self.orientation == ZERO_SLOW else self.flipped()


def normalize_signal(raw, orientation: str = ZERO_SLOW) -> RetimeSignal:
    """Rescale a signal to [0, 1] by its own minimum and maximum.

    A constant signal has no spread to rescale; it maps to all zeros, meaning
    no frame may be sped up beyond the uniform rate.
    """
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise InvalidInputError("signal must be a 1-D sequence of length >= 2")
    if not np.isfinite(arr).all():
        raise InvalidInputError("signal contains non-finite values")
    lo = arr.min()
    span = arr.max() - lo
    if span == 0.0:
        norm = np.zeros_like(arr)
    else:
        norm = (arr - lo) / span
    return RetimeSignal(arr, norm, orientation)


def interpolate_rows(matrix: SlownessMatrix, target_rows: int) -> SlownessMatrix:
    """Resample a slowness matrix to ``target_rows`` rows, column by column.

    Rows are placed on endpoint-aligned uniform grids, so the first and last
    rows survive exactly; each output row is re-normalized to sum to 1 to
    absorb rounding.
    """
    if matrix.rows < 2:
        raise InvalidInputError("row interpolation needs at least 2 source rows")
    if target_rows < 2:
        raise InvalidInputError("row interpolation needs at least 2 target rows")
    src_x = np.arange(matrix.rows, dtype=np.float64)
    dst_x = np.linspace(0.0, matrix.rows - 1.0, target_rows)
    out = np.empty((target_rows, matrix.classes))
    for j in range(matrix.classes):
        out[:, j] = np.interp(dst_x, src_x, matrix.probs[:, j])
    out /= out.sum(axis=1, keepdims=True)
    return SlownessMatrix(out, matrix.k)


def sharpen(matrix: SlownessMatrix, gap_threshold: float = DEFAULT_GAP_THRESHOLD) -> SlownessMatrix:
    """Increase prediction confidence until the matrix spans a wide gap.

    Re-normalizes each row as softmax(log(p) / T), halving the temperature T
    from 1 until the global maximum minus the global minimum entry exceeds
    ``gap_threshold``.  Rows made of exact ties cannot be separated by any
    temperature, hence the iteration cap.  Row-wise argmax is preserved
    whenever the maximum is unique.
    """
    if not 0.0 < gap_threshold < 1.0:
        raise InvalidInputError("gap threshold must lie strictly between 0 and 1")
    probs = matrix.probs
    if probs.max() - probs.min() > gap_threshold:
        return matrix
    log_probs = np.log(np.clip(probs, PROB_EPSILON, 1.0))
    temperature = 1.0
    sharpened = probs
    for _ in range(SHARPEN_MAX_HALVINGS):
        temperature *= 0.5
        scores = log_probs / temperature
        scores = scores - scores.max(axis=1, keepdims=True)
        weights = np.exp(scores)
        sharpened = weights / weights.sum(axis=1, keepdims=True)
        if sharpened.max() - sharpened.min() > gap_threshold:
            break
    return SlownessMatrix(sharpened, matrix.k)


def speediness_to_signal(matrix: SlownessMatrix) -> RetimeSignal:
    """Collapse class probabilities into one expected-speed-up scalar per row.

    The raw value is the probability-weighted admissible skip, so it lies in
    [1, 2**k]; larger means the frame looks slower and tolerates more
    speed-up.  The result is normalized with zero meaning "no speed-up".
    """
    raw = matrix.probs @ matrix.class_skips()
    return normalize_signal(raw, ZERO_SLOW)


def cosine_similarity_signal(features) -> RetimeSignal:
    """Signal from cosine similarity of consecutive per-frame feature vectors.

    Near-identical consecutive frames score close to 1 and may be sped up the
    most.  Input is an (n, dim) array of n >= 2 frame features; the raw
    signal has length n - 1.
    """
    feats = np.asarray(features, dtype=np.float64)
    if feats.ndim != 2 or feats.shape[0] < 2:
        raise InvalidInputError("need a 2-D (frames x dim) array with >= 2 frames")
    if not np.isfinite(feats).all():
        raise InvalidInputError("feature vectors contain non-finite values")
    norms = np.linalg.norm(feats, axis=1)
    if (norms == 0.0).any():
        raise InvalidInputError("feature vectors must have non-zero norm")
    dots = (feats[:-1] * feats[1:]).sum(axis=1)
    raw = dots / (norms[:-1] * norms[1:])
    return normalize_signal(raw, ZERO_SLOW)
