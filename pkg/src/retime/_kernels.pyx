# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled optimization kernels.

Must stay interchangeable with the pure-numpy twin ``retime._kernels_py``:
same signatures, same math, same accumulation structure.
"""

from libc.math cimport floor as c_floor, sqrt as c_sqrt

import numpy as np

BACKEND_NAME = "compiled"


cdef double _skip_eval(const double[::1] d, const double[:, ::1] probs, const double[::1] signal,
                       int mode, double strength, double n_frames,
                       double lambda_sum, double lambda_min, double lambda_smooth,
                       bint full_index_grad,
                       double[::1] grad, double[::1] index_grad,
                       double* terms) noexcept nogil:
    cdef Py_ssize_t l = d.shape[0]
    cdef Py_ssize_t rows = probs.shape[0]
    cdef Py_ssize_t classes = probs.shape[1]
    cdef Py_ssize_t size = signal.shape[0]
    cdef Py_ssize_t i, j, lo
    cdef double total = 0.0, resid, pair
    cdef double term_sum, term_min = 0.0, term_smooth = 0.0, term_data = 0.0
    cdef double nu = 0.0, x, xc, w, left, right, value, slope
    cdef double active, squared, gsum, threshold, acc

    total = 0.0
    for i in range(l):
        total += d[i]
    resid = total - n_frames
    term_sum = resid * resid
    for i in range(l):
        grad[i] = lambda_sum * 2.0 * resid

    for i in range(l):
        if d[i] < 1.0:
            term_min += 1.0 - d[i]
            grad[i] -= lambda_min

    for i in range(l - 1):
        pair = d[i + 1] - d[i]
        term_smooth += pair * pair
        grad[i] -= lambda_smooth * 2.0 * pair
        grad[i + 1] += lambda_smooth * 2.0 * pair

    # Data term of step q reads the table at the prefix sum through d[q]
    # (slowness rows describe gaps, so the landing reads row nu - 1); the
    # index path therefore feeds every d[t] with t <= q (reverse sweep).
    for i in range(l - 1):
        nu += d[i]
        if mode == 0:
            x = nu - 1.0
            xc = x
            if xc < 0.0:
                xc = 0.0
            if xc > rows - 1.0:
                xc = rows - 1.0
            lo = <Py_ssize_t>c_floor(xc)
            if lo > rows - 2:
                lo = rows - 2
            w = xc - lo
            gsum = 0.0
            index_grad[i] = 0.0
            for j in range(classes):
                left = probs[lo, j]
                right = probs[lo + 1, j]
                value = left + w * (right - left)
                threshold = <double>(<long long>1 << (classes - 1 - j))
                active = d[i] - threshold
                if active < 0.0:
                    active = 0.0
                squared = active * active
                term_data += value * squared
                gsum += value * 2.0 * active
                if x > 0.0 and x < rows - 1.0:
                    index_grad[i] += (right - left) * squared
            grad[i] += gsum
        else:
            x = nu
            xc = x
            if xc < 0.0:
                xc = 0.0
            if xc > size - 1.0:
                xc = size - 1.0
            lo = <Py_ssize_t>c_floor(xc)
            if lo > size - 2:
                lo = size - 2
            w = xc - lo
            left = signal[lo]
            right = signal[lo + 1]
            value = left + w * (right - left)
            if x > 0.0 and x < size - 1.0:
                slope = right - left
            else:
                slope = 0.0
            active = d[i] - strength * value - 1.0
            if active < 0.0:
                active = 0.0
            term_data += active * active
            grad[i] += 2.0 * active
            index_grad[i] = 2.0 * active * (-strength) * slope

    if full_index_grad:
        acc = 0.0
        for i in range(l - 2, -1, -1):
            acc += index_grad[i]
            grad[i] += acc

    terms[0] = term_data
    terms[1] = term_sum
    terms[2] = term_min
    terms[3] = term_smooth
    return (term_data + lambda_sum * term_sum + lambda_min * term_min
            + lambda_smooth * term_smooth)


def skip_loss_grad(d, probs, signal, mode, strength, n_frames,
                   lambda_sum, lambda_min, lambda_smooth, full_index_grad):
    """See ``retime._kernels_py.skip_loss_grad``."""
    cdef const double[::1] d_view = np.ascontiguousarray(d, dtype=np.float64)
    cdef const double[:, ::1] probs_view = np.ascontiguousarray(probs, dtype=np.float64)
    cdef const double[::1] signal_view = np.ascontiguousarray(signal, dtype=np.float64)
    cdef Py_ssize_t l = d_view.shape[0]
    grad_arr = np.zeros(l)
    index_arr = np.zeros(l - 1 if l > 1 else 1)
    cdef double[::1] grad = grad_arr
    cdef double[::1] index_grad = index_arr
    cdef double terms[4]
    cdef double total = _skip_eval(d_view, probs_view, signal_view, mode, strength,
                                   n_frames, lambda_sum, lambda_min, lambda_smooth,
                                   full_index_grad, grad, index_grad, terms)
    return total, grad_arr, terms[0], terms[1], terms[2], terms[3]


def optimize_skips(d0, probs, signal, mode, strength, n_frames,
                   lambda_sum, lambda_min, lambda_smooth, full_index_grad,
                   steps, learning_rate, beta1, beta2, adam_eps, floor):
    """See ``retime._kernels_py.optimize_skips``."""
    d_arr = np.array(d0, dtype=np.float64)
    cdef double[::1] d = d_arr
    cdef const double[:, ::1] probs_view = np.ascontiguousarray(probs, dtype=np.float64)
    cdef const double[::1] signal_view = np.ascontiguousarray(signal, dtype=np.float64)
    cdef Py_ssize_t l = d.shape[0]
    cdef Py_ssize_t n_steps = steps
    grad_arr = np.zeros(l)
    trace_arr = np.empty(n_steps)
    cdef double[::1] grad = grad_arr
    cdef double[::1] trace = trace_arr
    index_arr = np.zeros(l - 1 if l > 1 else 1)
    cdef double[::1] index_grad = index_arr
    m_arr = np.zeros(l)
    v_arr = np.zeros(l)
    cdef double[::1] m = m_arr
    cdef double[::1] v = v_arr
    cdef double terms[4]
    cdef double c_strength = strength, c_n = n_frames
    cdef double c_lsum = lambda_sum, c_lmin = lambda_min, c_lsmooth = lambda_smooth
    cdef double lr = learning_rate, b1 = beta1, b2 = beta2, eps = adam_eps
    cdef double c_floor_val = floor
    cdef bint full = full_index_grad
    cdef int c_mode = mode
    cdef double b1_acc = 1.0, b2_acc = 1.0, m_hat, v_hat, total
    cdef Py_ssize_t step, i
    with nogil:
        for step in range(n_steps):
            for i in range(l):
                grad[i] = 0.0
            total = _skip_eval(d, probs_view, signal_view, c_mode, c_strength, c_n,
                               c_lsum, c_lmin, c_lsmooth, full, grad, index_grad, terms)
            trace[step] = total
            b1_acc *= b1
            b2_acc *= b2
            for i in range(l):
                m[i] = b1 * m[i] + (1.0 - b1) * grad[i]
                v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i]
                m_hat = m[i] / (1.0 - b1_acc)
                v_hat = v[i] / (1.0 - b2_acc)
                d[i] = d[i] - lr * m_hat / (c_sqrt(v_hat) + eps)
                if d[i] < c_floor_val:
                    d[i] = c_floor_val
    return d_arr, trace_arr


cdef double _speedup_eval(const double[::1] u, const double[:, ::1] probs, double target,
                          double lambda_avg, double lambda_smooth,
                          double[::1] grad) noexcept nogil:
    cdef Py_ssize_t m = u.shape[0]
    cdef Py_ssize_t classes = probs.shape[1]
    cdef Py_ssize_t i, j
    cdef double term_fit = 0.0, term_avg, term_smooth = 0.0
    cdef double active, threshold, gsum, mean = 0.0, resid, pair

    for i in range(m):
        gsum = 0.0
        for j in range(classes):
            threshold = <double>(<long long>1 << (classes - 1 - j))
            active = u[i] - threshold
            if active < 0.0:
                active = 0.0
            term_fit += probs[i, j] * active * active
            gsum += probs[i, j] * 2.0 * active
        grad[i] = gsum
        mean += u[i]
    mean /= m
    resid = mean - target
    term_avg = resid * resid
    for i in range(m):
        grad[i] += lambda_avg * 2.0 * resid / m

    for i in range(m - 1):
        pair = u[i + 1] - u[i]
        term_smooth += pair * pair
        grad[i] -= lambda_smooth * 2.0 * pair
        grad[i + 1] += lambda_smooth * 2.0 * pair

    return term_fit + lambda_avg * term_avg + lambda_smooth * term_smooth


def speedup_loss_grad(u, probs, target, lambda_avg, lambda_smooth):
    """See ``retime._kernels_py.speedup_loss_grad``."""
    cdef const double[::1] u_view = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[:, ::1] probs_view = np.ascontiguousarray(probs, dtype=np.float64)
    grad_arr = np.zeros(u_view.shape[0])
    cdef double[::1] grad = grad_arr
    cdef double total = _speedup_eval(u_view, probs_view, target, lambda_avg,
                                      lambda_smooth, grad)
    return total, grad_arr


def optimize_speedups(u0, probs, target, lambda_avg, lambda_smooth,
                      steps, learning_rate, beta1, beta2, adam_eps, floor):
    """See ``retime._kernels_py.optimize_speedups``."""
    u_arr = np.array(u0, dtype=np.float64)
    cdef double[::1] u = u_arr
    cdef const double[:, ::1] probs_view = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t m_len = u.shape[0]
    cdef Py_ssize_t n_steps = steps
    grad_arr = np.zeros(m_len)
    trace_arr = np.empty(n_steps)
    cdef double[::1] grad = grad_arr
    cdef double[::1] trace = trace_arr
    m_arr = np.zeros(m_len)
    v_arr = np.zeros(m_len)
    cdef double[::1] m = m_arr
    cdef double[::1] v = v_arr
    cdef double c_target = target, c_lavg = lambda_avg, c_lsmooth = lambda_smooth
    cdef double lr = learning_rate, b1 = beta1, b2 = beta2, eps = adam_eps
    cdef double c_floor_val = floor
    cdef double b1_acc = 1.0, b2_acc = 1.0, m_hat, v_hat, total
    cdef Py_ssize_t step, i
    with nogil:
        for step in range(n_steps):
            total = _speedup_eval(u, probs_view, c_target, c_lavg, c_lsmooth, grad)
            trace[step] = total
            b1_acc *= b1
            b2_acc *= b2
            for i in range(m_len):
                m[i] = b1 * m[i] + (1.0 - b1) * grad[i]
                v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i]
                m_hat = m[i] / (1.0 - b1_acc)
                v_hat = v[i] / (1.0 - b2_acc)
                u[i] = u[i] - lr * m_hat / (c_sqrt(v_hat) + eps)
                if u[i] < c_floor_val:
                    u[i] = c_floor_val
    return u_arr, trace_arr


def integrate_walk(u, n_frames):
    """See ``retime._kernels_py.integrate_walk``."""
    cdef const double[::1] u_view = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t m = u_view.shape[0]
    cdef double c_n = n_frames
    cdef double u_min, t
    cdef Py_ssize_t i, idx, count, limit
    if m == 0:
        raise ValueError("speed-ups must be positive to advance the walk")
    u_min = u_view[0]
    for i in range(1, m):
        if u_view[i] < u_min:
            u_min = u_view[i]
    if u_min <= 0.0:
        raise ValueError("speed-ups must be positive to advance the walk")
    limit = <Py_ssize_t>(c_n / u_min) + 2
    positions_arr = np.empty(limit + 1)
    cdef double[::1] positions = positions_arr
    positions[0] = 0.0
    count = 1
    t = 0.0
    for i in range(limit):
        idx = <Py_ssize_t>c_floor(t + 0.5)
        if idx < 0:
            idx = 0
        elif idx > m - 1:
            idx = m - 1
        t = t + u_view[idx]
        if t >= c_n:
            break
        positions[count] = t
        count += 1
    else:
        raise RuntimeError("walk failed to cover the source video")
    return positions_arr[:count].copy()
