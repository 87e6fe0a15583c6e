# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython kernel implementations.

Compiled twins of `_pykernels.py`; signatures and semantics must stay in
lockstep with that module. The CRF recursions and the Pegasos inner loop
are sequential and tiny-state, which is exactly where the interpreter
overhead of the numpy fallback dominates.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log

cnp.import_array()


cdef inline double _logsumexp(double* xs, Py_ssize_t n) noexcept:
    cdef double m = xs[0]
    cdef Py_ssize_t i
    cdef double s = 0.0
    for i in range(1, n):
        if xs[i] > m:
            m = xs[i]
    for i in range(n):
        s += exp(xs[i] - m)
    return m + log(s)


def crf_forward_backward(double[:, ::1] unary, double[:, ::1] trans,
                         double[::1] start, double[::1] stop):
    """Log-space forward/backward over a linear chain.

    unary: (T, K) per-position tag scores; trans: (K, K); start/stop: (K,).
    Returns (logZ_forward, logZ_backward, node_marginals (T, K),
    pairwise_marginals summed over positions (K, K)).
    """
    cdef Py_ssize_t T = unary.shape[0]
    cdef Py_ssize_t K = unary.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] alpha_arr = np.empty((T, K))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] beta_arr = np.empty((T, K))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] node_arr = np.empty((T, K))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pair_arr = np.zeros((K, K))
    cdef double[:, ::1] alpha = alpha_arr
    cdef double[:, ::1] beta = beta_arr
    cdef double[:, ::1] node = node_arr
    cdef double[:, ::1] pair = pair_arr
    cdef double[::1] buf = np.empty(K)
    cdef Py_ssize_t t, i, k
    cdef double logz_f, logz_b

    for k in range(K):
        alpha[0, k] = start[k] + unary[0, k]
    for t in range(1, T):
        for k in range(K):
            for i in range(K):
                buf[i] = alpha[t - 1, i] + trans[i, k]
            alpha[t, k] = unary[t, k] + _logsumexp(&buf[0], K)
    for k in range(K):
        buf[k] = alpha[T - 1, k] + stop[k]
    logz_f = _logsumexp(&buf[0], K)

    for k in range(K):
        beta[T - 1, k] = stop[k]
    for t in range(T - 2, -1, -1):
        for i in range(K):
            for k in range(K):
                buf[k] = trans[i, k] + unary[t + 1, k] + beta[t + 1, k]
            beta[t, i] = _logsumexp(&buf[0], K)
    for k in range(K):
        buf[k] = start[k] + unary[0, k] + beta[0, k]
    logz_b = _logsumexp(&buf[0], K)

    for t in range(T):
        for k in range(K):
            node[t, k] = exp(alpha[t, k] + beta[t, k] - logz_f)
    for t in range(T - 1):
        for i in range(K):
            for k in range(K):
                pair[i, k] += exp(alpha[t, i] + trans[i, k] + unary[t + 1, k]
                                  + beta[t + 1, k] - logz_f)
    return logz_f, logz_b, node_arr, pair_arr


def crf_viterbi(double[:, ::1] unary, double[:, ::1] trans,
                double[::1] start, double[::1] stop):
    """Max-score path with first-maximum (lowest tag index) tie-breaking."""
    cdef Py_ssize_t T = unary.shape[0]
    cdef Py_ssize_t K = unary.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] bp_arr = np.zeros((T, K), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] path_arr = np.empty(T, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] backptr = bp_arr
    cdef cnp.int64_t[::1] path = path_arr
    cdef double[::1] delta = np.empty(K)
    cdef double[::1] nxt = np.empty(K)
    cdef Py_ssize_t t, i, k, best_i, last
    cdef double best, cand, score

    for k in range(K):
        delta[k] = start[k] + unary[0, k]
    for t in range(1, T):
        for k in range(K):
            best = delta[0] + trans[0, k]
            best_i = 0
            for i in range(1, K):
                cand = delta[i] + trans[i, k]
                if cand > best:
                    best = cand
                    best_i = i
            nxt[k] = best + unary[t, k]
            backptr[t, k] = best_i
        for k in range(K):
            delta[k] = nxt[k]
    best = delta[0] + stop[0]
    last = 0
    for k in range(1, K):
        cand = delta[k] + stop[k]
        if cand > best:
            best = cand
            last = k
    score = best
    path[T - 1] = last
    for t in range(T - 1, 0, -1):
        path[t - 1] = backptr[t, path[t]]
    return score, path_arr


def pegasos_epochs(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                   double[::1] data, double[::1] y, double[::1] sample_weights,
                   cnp.int64_t[::1] order, double lam, int loss_kind,
                   double[::1] v, double b, long t_start):
    """Run Pegasos steps over `order` (a flat sequence of example indices).

    The weight vector is maintained as w = scale * v with v updated in
    place, so the per-step regularization shrink is O(1). The bias is
    unregularized and follows a 1/t schedule. loss_kind: 0 = hinge,
    1 = logistic. Returns (scale, bias, next_t).
    """
    cdef double scale = 1.0
    cdef long t = t_start
    cdef Py_ssize_t si, i, j, row_start, row_end
    cdef double score, eta, yi, swi, coef, m, g

    for si in range(order.shape[0]):
        i = order[si]
        row_start = indptr[i]
        row_end = indptr[i + 1]
        score = 0.0
        for j in range(row_start, row_end):
            score += v[indices[j]] * data[j]
        score = scale * score + b
        eta = 1.0 / (lam * t)
        yi = y[i]
        swi = sample_weights[i]
        scale *= 1.0 - 1.0 / t
        if loss_kind == 0:
            if yi * score < 1.0:
                coef = eta * swi * yi / scale
                for j in range(row_start, row_end):
                    v[indices[j]] += coef * data[j]
                b += swi * yi / t
        else:
            m = yi * score
            if m > 0:
                g = exp(-m) / (1.0 + exp(-m))
            else:
                g = 1.0 / (1.0 + exp(m))
            coef = eta * swi * yi * g / scale
            for j in range(row_start, row_end):
                v[indices[j]] += coef * data[j]
            b += swi * yi * g / t
        t += 1
    return scale, b, t
