# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inference kernels; same contract as kernels.numpy_backend."""

from libc.math cimport exp, log

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "native"

ctypedef cnp.int64_t i64


cdef inline double _lse(const double* row, Py_ssize_t n) noexcept nogil:
    cdef double m = row[0]
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(1, n):
        if row[i] > m:
            m = row[i]
    for i in range(n):
        s += exp(row[i] - m)
    return m + log(s)


cdef void _forward(const double[:, ::1] node, const double[:, ::1] trans,
                   const double[::1] start, double[:, ::1] alpha,
                   double* work) noexcept nogil:
    cdef Py_ssize_t T = node.shape[0], L = node.shape[1]
    cdef Py_ssize_t t, y, p
    for y in range(L):
        alpha[0, y] = start[y] + node[0, y]
    for t in range(1, T):
        for y in range(L):
            for p in range(L):
                work[p] = alpha[t - 1, p] + trans[p, y]
            alpha[t, y] = node[t, y] + _lse(work, L)


cdef void _backward(const double[:, ::1] node, const double[:, ::1] trans,
                    double[:, ::1] beta, double* work) noexcept nogil:
    cdef Py_ssize_t T = node.shape[0], L = node.shape[1]
    cdef Py_ssize_t t, y, j
    for y in range(L):
        beta[T - 1, y] = 0.0
    for t in range(T - 2, -1, -1):
        for y in range(L):
            for j in range(L):
                work[j] = trans[y, j] + node[t + 1, j] + beta[t + 1, j]
            beta[t, y] = _lse(work, L)


def _as_f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _as_i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def forward(node, trans, start):
    node = _as_f64(node)
    cdef double[:, ::1] nd = node
    cdef double[:, ::1] tr = _as_f64(trans)
    cdef double[::1] st = _as_f64(start)
    alpha = np.empty_like(node)
    cdef double[:, ::1] al = alpha
    work = np.empty(nd.shape[1], dtype=np.float64)
    cdef double[::1] wk = work
    with nogil:
        _forward(nd, tr, st, al, &wk[0])
    return alpha


def backward(node, trans):
    node = _as_f64(node)
    cdef double[:, ::1] nd = node
    cdef double[:, ::1] tr = _as_f64(trans)
    beta = np.empty_like(node)
    cdef double[:, ::1] be = beta
    work = np.empty(nd.shape[1], dtype=np.float64)
    cdef double[::1] wk = work
    with nogil:
        _backward(nd, tr, be, &wk[0])
    return beta


def log_partition(node, trans, start):
    alpha = forward(node, trans, start)
    cdef double[:, ::1] al = alpha
    return float(_lse(&al[al.shape[0] - 1, 0], al.shape[1]))


def posteriors(node, trans, start):
    """(logZ, node marginals (T, L), edge marginals (T-1, L, L))."""
    node = _as_f64(node)
    trans = _as_f64(trans)
    cdef double[:, ::1] nd = node
    cdef double[:, ::1] tr = trans
    alpha = forward(node, trans, start)
    beta = backward(node, trans)
    cdef double[:, ::1] al = alpha
    cdef double[:, ::1] be = beta
    cdef Py_ssize_t T = nd.shape[0], L = nd.shape[1]
    cdef double logz = _lse(&al[T - 1, 0], L)
    unary = np.empty((T, L), dtype=np.float64)
    pair = np.empty((T - 1 if T > 1 else 0, L, L), dtype=np.float64)
    cdef double[:, ::1] un = unary
    cdef double[:, :, ::1] pr = pair
    cdef Py_ssize_t t, i, j
    with nogil:
        for t in range(T):
            for i in range(L):
                un[t, i] = exp(al[t, i] + be[t, i] - logz)
        for t in range(T - 1):
            for i in range(L):
                for j in range(L):
                    pr[t, i, j] = exp(
                        al[t, i] + tr[i, j] + nd[t + 1, j] + be[t + 1, j] - logz
                    )
    return float(logz), unary, pair


def viterbi_path(node, trans, start):
    """Best path and its score; ties pick the lowest label index."""
    node = _as_f64(node)
    cdef double[:, ::1] nd = node
    cdef double[:, ::1] tr = _as_f64(trans)
    cdef double[::1] st = _as_f64(start)
    cdef Py_ssize_t T = nd.shape[0], L = nd.shape[1]
    delta = np.empty(L, dtype=np.float64)
    prev = np.empty(L, dtype=np.float64)
    back = np.empty((T, L), dtype=np.int64)
    path = np.empty(T, dtype=np.int64)
    cdef double[::1] de = delta
    cdef double[::1] pv = prev
    cdef i64[:, ::1] bk = back
    cdef i64[::1] pa = path
    cdef Py_ssize_t t, y, p, arg
    cdef double best, cand, score
    with nogil:
        for y in range(L):
            de[y] = st[y] + nd[0, y]
        for t in range(1, T):
            for y in range(L):
                pv[y] = de[y]
            for y in range(L):
                arg = 0
                best = pv[0] + tr[0, y]
                for p in range(1, L):
                    cand = pv[p] + tr[p, y]
                    if cand > best:
                        best = cand
                        arg = p
                de[y] = nd[t, y] + best
                bk[t, y] = arg
        arg = 0
        score = de[0]
        for y in range(1, L):
            if de[y] > score:
                score = de[y]
                arg = y
        pa[T - 1] = arg
        for t in range(T - 1, 0, -1):
            pa[t - 1] = bk[t, pa[t]]
    return path, float(score)


def build_node_scores(unigram, feat_ids, feat_vals, offsets):
    """Node scores from CSR-style sparse features: one row per position."""
    cdef double[:, ::1] U = _as_f64(unigram)
    cdef i64[::1] ids = _as_i64(feat_ids)
    cdef double[::1] vals = _as_f64(feat_vals)
    cdef i64[::1] offs = _as_i64(offsets)
    cdef Py_ssize_t T = offs.shape[0] - 1, L = U.shape[1]
    node = np.zeros((T, L), dtype=np.float64)
    cdef double[:, ::1] nd = node
    cdef Py_ssize_t t, k, y
    cdef i64 f
    cdef double v
    with nogil:
        for t in range(T):
            for k in range(offs[t], offs[t + 1]):
                f = ids[k]
                v = vals[k]
                for y in range(L):
                    nd[t, y] += v * U[f, y]
    return node


def sequence_nll_grad(unigram, trans_full, feat_ids, feat_vals, offsets, gold,
                      grad_unigram, grad_trans_full):
    """One sentence's NLL term, accumulating its gradient in place.

    trans_full is (L+1, L): rows 0..L-1 are label-to-label transitions and
    row L is the virtual start.  Returns logZ - gold path score; gradients
    receive expected feature counts minus empirical counts.  Feature ids
    must be unique within each position (the encoder guarantees this).
    """
    cdef double[:, ::1] U = _as_f64(unigram)
    cdef double[:, ::1] TF = _as_f64(trans_full)
    cdef i64[::1] ids = _as_i64(feat_ids)
    cdef double[::1] vals = _as_f64(feat_vals)
    cdef i64[::1] offs = _as_i64(offsets)
    cdef i64[::1] gd = _as_i64(gold)
    cdef double[:, ::1] gU = grad_unigram
    cdef double[:, ::1] gT = grad_trans_full

    cdef Py_ssize_t L = TF.shape[1]
    cdef Py_ssize_t T = offs.shape[0] - 1
    node = np.zeros((T, L), dtype=np.float64)
    alpha = np.empty((T, L), dtype=np.float64)
    beta = np.empty((T, L), dtype=np.float64)
    work = np.empty(L, dtype=np.float64)
    cdef double[:, ::1] nd = node
    cdef double[:, ::1] al = alpha
    cdef double[:, ::1] be = beta
    cdef double[::1] wk = work

    cdef Py_ssize_t t, k, y, i, j
    cdef i64 f
    cdef double v, logz, gold_score, m
    with nogil:
        for t in range(T):
            for k in range(offs[t], offs[t + 1]):
                f = ids[k]
                v = vals[k]
                for y in range(L):
                    nd[t, y] += v * U[f, y]

        _forward(nd, TF[:L], TF[L], al, &wk[0])
        _backward(nd, TF[:L], be, &wk[0])
        logz = _lse(&al[T - 1, 0], L)

        gold_score = TF[L, gd[0]]
        for t in range(T):
            gold_score += nd[t, gd[t]]
        for t in range(1, T):
            gold_score += TF[gd[t - 1], gd[t]]

        # expected minus empirical unigram counts
        for t in range(T):
            for y in range(L):
                wk[y] = exp(al[t, y] + be[t, y] - logz)
            for k in range(offs[t], offs[t + 1]):
                f = ids[k]
                v = vals[k]
                for y in range(L):
                    gU[f, y] += v * wk[y]
                gU[f, gd[t]] -= v

        # transition counts; row L is the start row
        for t in range(T - 1):
            for i in range(L):
                m = al[t, i] - logz
                for j in range(L):
                    gT[i, j] += exp(m + TF[i, j] + nd[t + 1, j] + be[t + 1, j])
            gT[gd[t], gd[t + 1]] -= 1.0
        for y in range(L):
            gT[L, y] += exp(al[0, y] + be[0, y] - logz)
        gT[L, gd[0]] -= 1.0

    return float(logz - gold_score)
