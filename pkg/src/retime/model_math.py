"""Training-side math that needs no network: class-weighted cross-entropy
over speed classes and the temporal-difference channel augmentation."""

import numpy as np

from .errors import InvalidInputError

PROB_EPSILON = 1e-12


def class_weights(doublings: int) -> np.ndarray:
    """Per-class loss weights 1.25**(k - y), y = 0..k.

    Slower classes weigh more, biasing predictions toward lower playback
    speeds where ambiguous.
    """
    if doublings < 1:
        raise InvalidInputError("need at least one doubling")
    return 1.25 ** np.arange(doublings, -1, -1, dtype=np.float64)


def weighted_ce_loss(probs, labels, doublings, weights=None):
    """Class-weighted cross-entropy summed over prediction rows.

    ``probs`` is (rows, k+1) with each row a distribution, ``labels`` the
    integer target class per row.  Probabilities are clamped at 1e-12 before
    the log.  ``weights`` overrides the default class weighting.
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    if probs.ndim != 2 or probs.shape[1] != doublings + 1:
        raise InvalidInputError(f"probabilities must be 2-D with {doublings + 1} classes")
    if labels.ndim != 1 or labels.size != probs.shape[0]:
        raise InvalidInputError("need exactly one label per prediction row")
    if not np.issubdtype(labels.dtype, np.integer):
        raise InvalidInputError("labels must be integers")
    if labels.size and (labels.min() < 0 or labels.max() > doublings):
        raise InvalidInputError(f"labels must lie in [0, {doublings}]")
    w = class_weights(doublings) if weights is None else np.asarray(weights, np.float64)
    picked = probs[np.arange(labels.size), labels]
    return float(-(w[labels] * np.log(np.clip(picked, PROB_EPSILON, None))).sum())


def temporal_difference_concat(activations):
    """Concatenate forward temporal differences along the channel axis.

    Input (t+1, h, w, c) becomes (t, h, w, 2c): the original activations of
    the first t frames, then their frame-to-frame differences.
    """
    a = np.asarray(activations)
    if a.ndim != 4:
        raise InvalidInputError("activations must be a 4-D (time, h, w, c) array")
    if a.shape[0] < 2 or min(a.shape[1:]) < 1:
        raise InvalidInputError("need at least 2 time steps and non-empty dimensions")
    return np.concatenate([a[:-1], a[1:] - a[:-1]], axis=3)
