# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. ``_kernels_py`` mirrors every function here."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log1p, fabs

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32


def csr_build(const i64[:] rows, const i64[:] cols, i64 n_rows):
    """Counting-sort edges by row; ties keep edge-index order.

    Returns ``(indptr, col_idx, edge_idx)``.
    """
    cdef Py_ssize_t m = rows.shape[0]
    cdef Py_ssize_t i, r, pos
    indptr_a = np.zeros(n_rows + 1, dtype=np.int64)
    col_a = np.empty(m, dtype=np.int64)
    eid_a = np.empty(m, dtype=np.int64)
    fill_a = np.empty(n_rows, dtype=np.int64)
    cdef i64[:] indptr = indptr_a
    cdef i64[:] col = col_a
    cdef i64[:] eid = eid_a
    cdef i64[:] fill = fill_a
    for i in range(m):
        r = rows[i]
        if r < 0 or r >= n_rows:
            raise IndexError("row index out of range")
        indptr[r + 1] += 1
    for r in range(n_rows):
        indptr[r + 1] += indptr[r]
        fill[r] = indptr[r]
    for i in range(m):
        r = rows[i]
        pos = fill[r]
        col[pos] = cols[i]
        eid[pos] = i
        fill[r] = pos + 1
    return indptr_a, col_a, eid_a


def incident_merge(const i64[:] out_ptr, const i64[:] out_eid,
                   const i64[:] in_ptr, const i64[:] in_eid,
                   const i64[:] caps):
    """Per node, merge sorted out- and in-edge index lists.

    Self loops (present in both lists) are kept once. Each node keeps at most
    ``caps[node]`` of its smallest edge indices. Returns ``(ptr, edge_idx)``.
    """
    cdef Py_ssize_t n = out_ptr.shape[0] - 1
    cdef Py_ssize_t v, a, a_end, b, b_end, k, cap, total
    cdef i64 x, y
    total = 0
    for v in range(n):
        k = (out_ptr[v + 1] - out_ptr[v]) + (in_ptr[v + 1] - in_ptr[v])
        total += k if k < caps[v] else caps[v]
    ptr_a = np.zeros(n + 1, dtype=np.int64)
    res_a = np.empty(total, dtype=np.int64)
    cdef i64[:] ptr = ptr_a
    cdef i64[:] res = res_a
    cdef Py_ssize_t w = 0
    for v in range(n):
        a = out_ptr[v]
        a_end = out_ptr[v + 1]
        b = in_ptr[v]
        b_end = in_ptr[v + 1]
        cap = caps[v]
        k = 0
        while k < cap and (a < a_end or b < b_end):
            if b >= b_end:
                x = out_eid[a]
                a += 1
            elif a >= a_end:
                x = in_eid[b]
                b += 1
            else:
                x = out_eid[a]
                y = in_eid[b]
                if x < y:
                    a += 1
                elif y < x:
                    x = y
                    b += 1
                else:
                    a += 1
                    b += 1
            res[w] = x
            w += 1
            k += 1
        ptr[v + 1] = w
    return ptr_a, res_a[:w].copy()


cdef inline double _log_sigmoid_neg(double x) nogil:
    # -log(sigmoid(x))
    if x >= 0:
        return log1p(exp(-x))
    return -x + log1p(exp(x))


def sgns_block(double[:, ::1] syn0, double[:, ::1] syn1,
               const i32[:] tokens, const i64[:] sent_ptr,
               const i32[:] windows, const i32[:, ::1] negs,
               double alpha0, double min_alpha,
               i64 done_before, i64 total_tokens):
    """One pass of skip-gram negative-sampling updates over a block of sentences.

    ``negs`` holds one row of negative ids per (center, context) pair, consumed
    in iteration order. Returns ``(loss_sum, n_pairs)``.
    """
    cdef Py_ssize_t dim = syn0.shape[1]
    cdef Py_ssize_t n_neg = negs.shape[1]
    cdef Py_ssize_t n_sent = sent_ptr.shape[0] - 1
    cdef Py_ssize_t s, i, j, lo, hi, start, end, k, q
    cdef i64 pair = 0
    cdef i64 g
    cdef i32 center, target, w
    cdef double alpha, dot, f, grad, loss = 0.0
    cdef double[::1] neu1e = np.zeros(dim, dtype=np.float64)
    for s in range(n_sent):
        start = sent_ptr[s]
        end = sent_ptr[s + 1]
        for i in range(start, end):
            g = done_before + i
            alpha = alpha0 - (alpha0 - min_alpha) * (<double> g) / (<double> total_tokens)
            if alpha < min_alpha:
                alpha = min_alpha
            center = tokens[i]
            w = windows[i]
            lo = i - w
            if lo < start:
                lo = start
            hi = i + w + 1
            if hi > end:
                hi = end
            for j in range(lo, hi):
                if j == i:
                    continue
                for q in range(dim):
                    neu1e[q] = 0.0
                for k in range(n_neg + 1):
                    if k == 0:
                        target = tokens[j]
                    else:
                        target = negs[pair, k - 1]
                        if target == tokens[j]:
                            continue
                    dot = 0.0
                    for q in range(dim):
                        dot += syn0[center, q] * syn1[target, q]
                    if k == 0:
                        f = 1.0 / (1.0 + exp(-dot))
                        grad = (1.0 - f) * alpha
                        loss += _log_sigmoid_neg(dot)
                    else:
                        f = 1.0 / (1.0 + exp(-dot))
                        grad = (0.0 - f) * alpha
                        loss += _log_sigmoid_neg(-dot)
                    for q in range(dim):
                        neu1e[q] += grad * syn1[target, q]
                    for q in range(dim):
                        syn1[target, q] += grad * syn0[center, q]
                for q in range(dim):
                    syn0[center, q] += neu1e[q]
                pair += 1
    return loss, pair
