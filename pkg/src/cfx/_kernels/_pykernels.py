"""Pure-numpy kernel implementations.

These are the fallback twins of the Cython kernels in `_ckernels.pyx`;
both expose the same signatures and semantics, and the test suite checks
that their outputs agree. Keep any behavioral change mirrored in both.
"""

from __future__ import annotations

import math

import numpy as np


def _logsumexp_rows(m: np.ndarray) -> np.ndarray:
    """Row-wise logsumexp of a 2-D array."""
    mx = m.max(axis=1)
    return mx + np.log(np.exp(m - mx[:, None]).sum(axis=1))


def crf_forward_backward(
    unary: np.ndarray, trans: np.ndarray, start: np.ndarray, stop: np.ndarray
) -> tuple[float, float, np.ndarray, np.ndarray]:
    """Log-space forward/backward over a linear chain.

    unary: (T, K) per-position tag scores; trans: (K, K); start/stop: (K,).
    Returns (logZ_forward, logZ_backward, node_marginals (T, K),
    pairwise_marginals summed over positions (K, K)).
    """
    T, K = unary.shape
    alpha = np.empty((T, K))
    alpha[0] = start + unary[0]
    for t in range(1, T):
        # alpha[t][k] = unary[t][k] + logsumexp_i(alpha[t-1][i] + trans[i][k])
        alpha[t] = unary[t] + _logsumexp_rows((alpha[t - 1][:, None] + trans).T)
    logz_f = float(_logsumexp_rows((alpha[T - 1] + stop)[None, :])[0])

    beta = np.empty((T, K))
    beta[T - 1] = stop
    for t in range(T - 2, -1, -1):
        beta[t] = _logsumexp_rows(trans + (unary[t + 1] + beta[t + 1])[None, :])
    logz_b = float(_logsumexp_rows((start + unary[0] + beta[0])[None, :])[0])

    node = np.exp(alpha + beta - logz_f)
    pair = np.zeros((K, K))
    for t in range(T - 1):
        pair += np.exp(alpha[t][:, None] + trans + (unary[t + 1] + beta[t + 1])[None, :] - logz_f)
    return logz_f, logz_b, node, pair


def crf_viterbi(
    unary: np.ndarray, trans: np.ndarray, start: np.ndarray, stop: np.ndarray
) -> tuple[float, np.ndarray]:
    """Max-score path with first-maximum (lowest tag index) tie-breaking."""
    T, K = unary.shape
    delta = start + unary[0]
    backptr = np.zeros((T, K), dtype=np.int64)
    for t in range(1, T):
        cand = delta[:, None] + trans  # (prev, cur)
        backptr[t] = np.argmax(cand, axis=0)  # argmax keeps the first max
        delta = cand[backptr[t], np.arange(K)] + unary[t]
    final = delta + stop
    last = int(np.argmax(final))
    path = np.empty(T, dtype=np.int64)
    path[T - 1] = last
    for t in range(T - 1, 0, -1):
        path[t - 1] = backptr[t, path[t]]
    return float(final[last]), path


def pegasos_epochs(
    indptr: np.ndarray,
    indices: np.ndarray,
    data: np.ndarray,
    y: np.ndarray,
    sample_weights: np.ndarray,
    order: np.ndarray,
    lam: float,
    loss_kind: int,
    v: np.ndarray,
    b: float,
    t_start: int,
) -> tuple[float, float, int]:
    """Run Pegasos steps over `order` (a flat sequence of example indices).

    The weight vector is maintained as w = scale * v with v updated in
    place, so the per-step regularization shrink is O(1). The bias is
    unregularized and follows a 1/t schedule. loss_kind: 0 = hinge,
    1 = logistic. Returns (scale, bias, next_t).
    """
    scale = 1.0
    t = t_start
    for idx in order:
        i = int(idx)
        row_start, row_end = indptr[i], indptr[i + 1]
        cols = indices[row_start:row_end]
        vals = data[row_start:row_end]
        score = scale * float(v[cols] @ vals) + b
        eta = 1.0 / (lam * t)
        yi = y[i]
        swi = sample_weights[i]
        scale *= 1.0 - 1.0 / t  # (1 - eta * lam)
        if loss_kind == 0:
            if yi * score < 1.0:
                coef = eta * swi * yi
                v[cols] += (coef / scale) * vals
                b += swi * yi / t
        else:
            # d/ds ln(1 + exp(-y s)) = -y * sigmoid(-y s), computed stably
            m = yi * score
            g = math.exp(-m) / (1.0 + math.exp(-m)) if m > 0 else 1.0 / (1.0 + math.exp(m))
            coef = eta * swi * yi * g
            v[cols] += (coef / scale) * vals
            b += swi * yi * g / t
        t += 1
    return scale, b, t
