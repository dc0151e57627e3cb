"""Pure-numpy inference kernels.

All scores live in the log domain.  A lattice is a (T, L) node-score
matrix plus an (L, L) transition matrix and an (L,) start vector (the
virtual-BOS transition row); the score of a path y is

    start[y0] + sum_t node[t, y_t] + sum_{t>0} trans[y_{t-1}, y_t]

Sums over paths use log-sum-exp with the max trick, so scores with
magnitude up to several hundred cannot overflow.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def _lse(a, axis):
    m = np.max(a, axis=axis, keepdims=True)
    return np.squeeze(m, axis) + np.log(np.sum(np.exp(a - m), axis=axis))


def forward(node, trans, start):
    """Log alphas: alpha[t, y] = log-sum over prefixes ending in y at t."""
    T, L = node.shape
    alpha = np.empty((T, L))
    alpha[0] = start + node[0]
    for t in range(1, T):
        alpha[t] = node[t] + _lse(alpha[t - 1][:, None] + trans, axis=0)
    return alpha


def backward(node, trans):
    """Log betas: beta[t, y] = log-sum over suffixes leaving y at t."""
    T, L = node.shape
    beta = np.empty((T, L))
    beta[T - 1] = 0.0
    for t in range(T - 2, -1, -1):
        beta[t] = _lse(trans + (node[t + 1] + beta[t + 1])[None, :], axis=1)
    return beta


def log_partition(node, trans, start):
    return float(_lse(forward(node, trans, start)[-1], axis=0))


def posteriors(node, trans, start):
    """(logZ, node marginals (T, L), edge marginals (T-1, L, L))."""
    T, L = node.shape
    alpha = forward(node, trans, start)
    beta = backward(node, trans)
    logz = float(_lse(alpha[-1], axis=0))
    unary = np.exp(alpha + beta - logz)
    pair = np.empty((max(T - 1, 0), L, L))
    for t in range(T - 1):
        pair[t] = np.exp(
            alpha[t][:, None] + trans + (node[t + 1] + beta[t + 1])[None, :] - logz
        )
    return logz, unary, pair


def viterbi_path(node, trans, start):
    """Best path and its score; ties pick the lowest label index."""
    T, L = node.shape
    delta = start + node[0]
    back = np.empty((T, L), dtype=np.intp)
    for t in range(1, T):
        cand = delta[:, None] + trans
        back[t] = np.argmax(cand, axis=0)
        delta = node[t] + cand[back[t], np.arange(L)]
    path = np.empty(T, dtype=np.intp)
    path[-1] = int(np.argmax(delta))
    score = float(delta[path[-1]])
    for t in range(T - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return path, score


def build_node_scores(unigram, feat_ids, feat_vals, offsets):
    """Node scores from CSR-style sparse features: one row per position."""
    T = len(offsets) - 1
    node = np.zeros((T, unigram.shape[1]))
    for t in range(T):
        sl = slice(offsets[t], offsets[t + 1])
        if sl.start != sl.stop:
            node[t] = feat_vals[sl] @ unigram[feat_ids[sl]]
    return node


def sequence_nll_grad(unigram, trans_full, feat_ids, feat_vals, offsets, gold,
                      grad_unigram, grad_trans_full):
    """One sentence's NLL term, accumulating its gradient in place.

    trans_full is (L+1, L): rows 0..L-1 are label-to-label transitions and
    row L is the virtual start.  Returns logZ - gold path score; gradients
    receive expected feature counts minus empirical counts.  Feature ids
    must be unique within each position (the encoder guarantees this).
    """
    L = trans_full.shape[1]
    trans, start = trans_full[:L], trans_full[L]
    T = len(offsets) - 1
    node = build_node_scores(unigram, feat_ids, feat_vals, offsets)

    logz, unary, pair = posteriors(node, trans, start)
    gold_score = start[gold[0]] + node[np.arange(T), gold].sum()
    if T > 1:
        gold_score += trans[gold[:-1], gold[1:]].sum()

    for t in range(T):
        sl = slice(offsets[t], offsets[t + 1])
        ids, vals = feat_ids[sl], feat_vals[sl]
        if len(ids) == 0:
            continue
        grad_unigram[ids] += vals[:, None] * unary[t][None, :]
        grad_unigram[ids, gold[t]] -= vals
    if T > 1:
        grad_trans_full[:L] += pair.sum(axis=0)
        np.add.at(grad_trans_full, (gold[:-1], gold[1:]), -1.0)
    grad_trans_full[L] += unary[0]
    grad_trans_full[L, gold[0]] -= 1.0

    return float(logz - gold_score)
