"""Synthetic ground-truth skip sequences with perfect slowness predictions.

Skips evolve as a sticky Markov chain over the powers of two {1, 2, ..., 2**k};
the matching slowness matrix marks, for every source frame, exactly the class
of the skip that consumed it.  Everything is parameterized by an explicit
seeded generator, so cases are reproducible and safe to build in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .signals import DEFAULT_DOUBLINGS, SlownessMatrix

SIGMA_HIGH = 0.1  # upper end of the per-case change-probability range


@dataclass(frozen=True)
class GroundTruthCase:
    """A sampled skip sequence plus the slowness matrix that encodes it perfectly."""

    skips: np.ndarray      # length l, each a power of two in [1, 2**k]
    labels: np.ndarray     # log2 of each skip
    n: int                 # source frame count, equals sum(skips)
    l: int                 # target frame count, equals len(skips)
    slowness: SlownessMatrix
    seed: int

    def __post_init__(self):
        skips = np.ascontiguousarray(self.skips, dtype=np.int64)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        skips.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "skips", skips)
        object.__setattr__(self, "labels", labels)
        if self.n != int(skips.sum()):
            raise InvalidInputError("case frame count must equal the skip total")
        if self.l != skips.size or labels.size != skips.size:
            raise InvalidInputError("case length must match the skip sequence")

    @property
    def k(self) -> int:
        return self.slowness.k


def sample_sigma(rng: np.random.Generator) -> float:
    """Draw the probability of a speed change between consecutive steps."""
    return float(rng.uniform(0.0, SIGMA_HIGH))


def sample_skips(count: int, doublings: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Sample a skip sequence from the sticky Markov chain.

    The first skip is uniform over {1, 2, ..., 2**doublings}; every later one
    repeats its predecessor with probability 1 - sigma and otherwise jumps to
    one of the ``doublings`` other values uniformly.
    """
    if count < 1:
        raise InvalidInputError("need at least one skip")
    if doublings < 1:
        raise InvalidInputError("need at least one doubling")
    if not 0.0 <= sigma <= 1.0:
        raise InvalidInputError(f"change probability must lie in [0, 1], got {sigma}")
    values = [1 << j for j in range(doublings + 1)]
    state = int(rng.integers(doublings + 1))
    out = np.empty(count, dtype=np.int64)
    out[0] = values[state]
    for i in range(1, count):
        if rng.random() < sigma:
            jump = int(rng.integers(doublings))
            if jump >= state:
                jump += 1
            state = jump
        out[i] = values[state]
    return out


def skips_to_indices(skips, n_source: int, rng: np.random.Generator) -> np.ndarray:
    """Place a skip sequence inside a longer video at a random offset.

    Returns the frame positions rho + [0, s1, s1+s2, ...], one per visited
    frame, where rho is uniform over the slack [0, n_source - sum(skips)].
    """
    skips = np.asarray(skips, dtype=np.int64)
    total = int(skips.sum())
    if n_source < total:
        raise InvalidInputError(
            f"source of {n_source} frames cannot cover a skip total of {total}"
        )
    offset = int(rng.integers(0, n_source - total + 1))
    return offset + np.concatenate(([0], np.cumsum(skips)))


def perfect_slowness(skips, doublings: int = DEFAULT_DOUBLINGS) -> SlownessMatrix:
    """One-hot slowness matrix encoding a known skip sequence exactly.

    Each source frame consumed by a skip of 2**y is one-hot at the class
    whose admissible speed-up is 2**y, i.e. column doublings - y.
    """
    skips = np.asarray(skips, dtype=np.int64)
    if skips.size < 1:
        raise InvalidInputError("need at least one skip")
    labels = skip_labels(skips, doublings)
    columns = doublings - labels
    rows = np.repeat(columns, skips)
    probs = np.zeros((rows.size, doublings + 1))
    probs[np.arange(rows.size), rows] = 1.0
    return SlownessMatrix(probs, doublings)


def skip_labels(skips, doublings: int) -> np.ndarray:
    """Class labels log2(skip), validating that skips are admissible powers of two."""
    skips = np.asarray(skips, dtype=np.int64)
    labels = np.round(np.log2(skips)).astype(np.int64)
    if ((1 << labels.clip(0)) != skips).any() or labels.min() < 0 or labels.max() > doublings:
        raise InvalidInputError(f"skips must be powers of two in [1, {1 << doublings}]")
    return labels


def make_case(l: int, k: int, sigma: float, seed: int) -> GroundTruthCase:
    """Sample a ground-truth case with exactly ``l`` skips."""
    if l < 2:
        raise InvalidInputError("need at least two target frames")
    rng = np.random.default_rng(seed)
    skips = sample_skips(l, k, sigma, rng)
    return GroundTruthCase(
        skips=skips,
        labels=skip_labels(skips, k),
        n=int(skips.sum()),
        l=int(skips.size),
        slowness=perfect_slowness(skips, k),
        seed=seed,
    )


def make_duration_case(
    seconds: float,
    fps: int = 30,
    k: int = DEFAULT_DOUBLINGS,
    seed: int = 0,
    sigma: float | None = None,
) -> GroundTruthCase:
    """Sample a case whose skips cover exactly ``fps * seconds`` source frames.

    The chain runs until the skip total reaches the frame count; if the last
    draw overshoots, it is replaced by the largest powers of two that land on
    the target exactly, keeping every skip admissible.  When ``sigma`` is
    None it is drawn per case.
    """
    n = int(round(fps * seconds))
    if n < 2:
        raise InvalidInputError("duration must cover at least two frames")
    rng = np.random.default_rng(seed)
    if sigma is None:
        sigma = sample_sigma(rng)
    elif not 0.0 <= sigma <= 1.0:
        raise InvalidInputError(f"change probability must lie in [0, 1], got {sigma}")
    values = [1 << j for j in range(k + 1)]
    state = int(rng.integers(k + 1))
    skips = []
    total = 0
    while total < n:
        if skips:
            if rng.random() < sigma:
                jump = int(rng.integers(k))
                if jump >= state:
                    jump += 1
                state = jump
        skips.append(values[state])
        total += values[state]
    if total > n:
        total -= skips.pop()
        gap = n - total
        while gap > 0:
            step = 1 << min(int(gap).bit_length() - 1, k)
            skips.append(step)
            gap -= step
    skips = np.asarray(skips, dtype=np.int64)
    return GroundTruthCase(
        skips=skips,
        labels=skip_labels(skips, k),
        n=n,
        l=int(skips.size),
        slowness=perfect_slowness(skips, k),
        seed=seed,
    )
