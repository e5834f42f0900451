"""Pure-numpy optimization kernels.

Behavioural reference for the compiled extension ``retime._kernels``; the two
must stay interchangeable (same signatures, same math, same accumulation
structure).  ``retime._backend`` picks one at import time.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _interp_columns(table: np.ndarray, x: np.ndarray):
    """Linear row interpolation of a 2-D table at real positions ``x``.

    Positions are clamped to [0, rows - 1]; outside that open interval the
    value is held constant, so the slope there is zero.  Returns the
    interpolated rows and their derivative with respect to ``x``.
    """
    rows = table.shape[0]
    xc = np.clip(x, 0.0, rows - 1.0)
    lo = np.minimum(np.floor(xc).astype(np.intp), rows - 2)
    w = xc - lo
    left = table[lo]
    right = table[lo + 1]
    values = left + w[:, None] * (right - left)
    in_range = (x > 0.0) & (x < rows - 1.0)
    slopes = np.where(in_range[:, None], right - left, 0.0)
    return values, slopes


def _interp_values(vec: np.ndarray, x: np.ndarray):
    """1-D variant of :func:`_interp_columns`."""
    size = vec.shape[0]
    xc = np.clip(x, 0.0, size - 1.0)
    lo = np.minimum(np.floor(xc).astype(np.intp), size - 2)
    w = xc - lo
    left = vec[lo]
    right = vec[lo + 1]
    values = left + w * (right - left)
    in_range = (x > 0.0) & (x < size - 1.0)
    slopes = np.where(in_range, right - left, 0.0)
    return values, slopes


def skip_loss_grad(
    d,
    probs,
    signal,
    mode,
    strength,
    n_frames,
    lambda_sum,
    lambda_min,
    lambda_smooth,
    full_index_grad,
):
    """Total penalty objective over a skip sequence and its exact gradient.

    mode 0 scores each skip against slowness probabilities interpolated at
    the last gap the step crosses (slowness rows describe the gap between a
    frame and its successor, so the landing at position nu reads row nu - 1);
    mode 1 scores it against a normalized per-frame signal at the landing
    position scaled by ``strength``.  Either way the read position is the
    prefix sum through d[q], so with ``full_index_grad`` every d[t] also
    collects the index-path contribution of all later terms in one reverse
    sweep.

    Returns (total, grad, data_term, sum_term, min_term, smooth_term) with
    the individual terms unweighted.
    """
    d = np.asarray(d, dtype=np.float64)
    l = d.shape[0]
    grad = np.zeros(l)
    nu = np.cumsum(d)

    resid = nu[-1] - n_frames
    term_sum = resid * resid
    grad += lambda_sum * 2.0 * resid

    term_min = float(np.maximum(0.0, 1.0 - d).sum())
    grad -= lambda_min * (d < 1.0)

    steps = np.diff(d)
    term_smooth = float(steps @ steps)
    pair = 2.0 * steps
    grad[:-1] -= lambda_smooth * pair
    grad[1:] += lambda_smooth * pair

    x = nu[: l - 1]
    lead = d[: l - 1]
    if mode == 0:
        classes = probs.shape[1]
        thresholds = 2.0 ** np.arange(classes - 1, -1, -1)
        values, slopes = _interp_columns(probs, x - 1.0)
        active = np.maximum(0.0, lead[:, None] - thresholds[None, :])
        squared = active * active
        term_data = float((values * squared).sum())
        grad[: l - 1] += (values * 2.0 * active).sum(axis=1)
        index_grad = (slopes * squared).sum(axis=1)
    else:
        values, slopes = _interp_values(signal, x)
        active = np.maximum(0.0, lead - strength * values - 1.0)
        term_data = float(active @ active)
        grad[: l - 1] += 2.0 * active
        index_grad = 2.0 * active * (-strength) * slopes
    if full_index_grad:
        grad[: l - 1] += np.cumsum(index_grad[::-1])[::-1]

    total = (
        term_data
        + lambda_sum * term_sum
        + lambda_min * term_min
        + lambda_smooth * term_smooth
    )
    return total, grad, term_data, float(term_sum), term_min, term_smooth


def optimize_skips(
    d0,
    probs,
    signal,
    mode,
    strength,
    n_frames,
    lambda_sum,
    lambda_min,
    lambda_smooth,
    full_index_grad,
    steps,
    learning_rate,
    beta1,
    beta2,
    adam_eps,
    floor,
):
    """Adam descent on :func:`skip_loss_grad` with a per-step floor projection.

    Returns the final skips and the loss recorded at the start of each step.
    """
    d = np.array(d0, dtype=np.float64)
    m = np.zeros_like(d)
    v = np.zeros_like(d)
    trace = np.empty(steps)
    b1_acc = 1.0
    b2_acc = 1.0
    for step in range(steps):
        total, grad = skip_loss_grad(
            d, probs, signal, mode, strength, n_frames,
            lambda_sum, lambda_min, lambda_smooth, full_index_grad,
        )[:2]
        trace[step] = total
        b1_acc *= beta1
        b2_acc *= beta2
        m = beta1 * m + (1.0 - beta1) * grad
        v = beta2 * v + (1.0 - beta2) * grad * grad
        m_hat = m / (1.0 - b1_acc)
        v_hat = v / (1.0 - b2_acc)
        d = d - learning_rate * m_hat / (np.sqrt(v_hat) + adam_eps)
        np.maximum(d, floor, out=d)
    return d, trace


def speedup_loss_grad(u, probs, target, lambda_avg, lambda_smooth):
    """Per-source-frame speed-up objective and gradient.

    Probabilities are read at fixed integer source positions; the mean
    speed-up is pulled toward ``target`` by a quadratic penalty.
    """
    u = np.asarray(u, dtype=np.float64)
    m = u.shape[0]
    classes = probs.shape[1]
    thresholds = 2.0 ** np.arange(classes - 1, -1, -1)
    active = np.maximum(0.0, u[:, None] - thresholds[None, :])
    term_fit = float((probs * active * active).sum())
    grad = (probs * 2.0 * active).sum(axis=1)

    resid = u.mean() - target
    term_avg = resid * resid
    grad += lambda_avg * 2.0 * resid / m

    steps = np.diff(u)
    term_smooth = float(steps @ steps)
    pair = 2.0 * steps
    grad[:-1] -= lambda_smooth * pair
    grad[1:] += lambda_smooth * pair

    total = term_fit + lambda_avg * term_avg + lambda_smooth * term_smooth
    return total, grad


def optimize_speedups(
    u0,
    probs,
    target,
    lambda_avg,
    lambda_smooth,
    steps,
    learning_rate,
    beta1,
    beta2,
    adam_eps,
    floor,
):
    """Adam descent on :func:`speedup_loss_grad` with a floor projection."""
    u = np.array(u0, dtype=np.float64)
    m = np.zeros_like(u)
    v = np.zeros_like(u)
    trace = np.empty(steps)
    b1_acc = 1.0
    b2_acc = 1.0
    for step in range(steps):
        total, grad = speedup_loss_grad(u, probs, target, lambda_avg, lambda_smooth)
        trace[step] = total
        b1_acc *= beta1
        b2_acc *= beta2
        m = beta1 * m + (1.0 - beta1) * grad
        v = beta2 * v + (1.0 - beta2) * grad * grad
        m_hat = m / (1.0 - b1_acc)
        v_hat = v / (1.0 - b2_acc)
        u = u - learning_rate * m_hat / (np.sqrt(v_hat) + adam_eps)
        np.maximum(u, floor, out=u)
    return u, trace


def integrate_walk(u, n_frames):
    """Walk the source video by the local speed-up until it is covered.

    Starting at position 0, each step advances by the speed-up stored at the
    nearest source frame; positions are emitted while they stay below
    ``n_frames``.
    """
    u = np.asarray(u, dtype=np.float64)
    m = u.shape[0]
    if m == 0 or u.min() <= 0.0:
        raise ValueError("speed-ups must be positive to advance the walk")
    limit = int(n_frames / u.min()) + 2
    positions = [0.0]
    t = 0.0
    for _ in range(limit):
        idx = int(np.floor(t + 0.5))
        if idx < 0:
            idx = 0
        elif idx > m - 1:
            idx = m - 1
        t = t + u[idx]
        if t >= n_frames:
            break
        positions.append(t)
    else:
        raise RuntimeError("walk failed to cover the source video")
    return np.asarray(positions)
