"""Pure-Python fallbacks for :mod:`provdistill._kernels`.

Same signatures and same update order as the compiled versions; used when the
extension is not built or when ``PROVDISTILL_PURE_PYTHON=1``.
"""
import math

import numpy as np


def csr_build(rows, cols, n_rows):
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if rows.size and (rows.min() < 0 or rows.max() >= n_rows):
        raise IndexError("row index out of range")
    order = np.argsort(rows, kind="stable")
    counts = np.bincount(rows, minlength=n_rows)
    indptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, cols[order].copy(), order.astype(np.int64)


def incident_merge(out_ptr, out_eid, in_ptr, in_eid, caps):
    n = len(out_ptr) - 1
    ptr = np.zeros(n + 1, dtype=np.int64)
    chunks = []
    total = 0
    for v in range(n):
        merged = np.union1d(out_eid[out_ptr[v]:out_ptr[v + 1]], in_eid[in_ptr[v]:in_ptr[v + 1]])
        merged = merged[: caps[v]]
        chunks.append(merged)
        total += len(merged)
        ptr[v + 1] = total
    res = np.concatenate(chunks).astype(np.int64) if chunks else np.zeros(0, dtype=np.int64)
    return ptr, res


def _log_sigmoid_neg(x):
    if x >= 0:
        return math.log1p(math.exp(-x))
    return -x + math.log1p(math.exp(x))


def sgns_block(syn0, syn1, tokens, sent_ptr, windows, negs,
               alpha0, min_alpha, done_before, total_tokens):
    n_neg = negs.shape[1]
    pair = 0
    loss = 0.0
    for s in range(len(sent_ptr) - 1):
        start, end = int(sent_ptr[s]), int(sent_ptr[s + 1])
        for i in range(start, end):
            alpha = alpha0 - (alpha0 - min_alpha) * float(done_before + i) / float(total_tokens)
            alpha = max(alpha, min_alpha)
            center = tokens[i]
            w = int(windows[i])
            lo, hi = max(i - w, start), min(i + w + 1, end)
            v = syn0[center]
            for j in range(lo, hi):
                if j == i:
                    continue
                neu1e = np.zeros_like(v)
                ctx = tokens[j]
                for k in range(n_neg + 1):
                    if k == 0:
                        target, label = ctx, 1.0
                    else:
                        target, label = negs[pair, k - 1], 0.0
                        if target == ctx:
                            continue
                    u = syn1[target]
                    dot = float(v @ u)
                    f = 1.0 / (1.0 + math.exp(-dot))
                    grad = (label - f) * alpha
                    loss += _log_sigmoid_neg(dot if k == 0 else -dot)
                    neu1e += grad * u
                    u += grad * v
                v += neu1e
                pair += 1
    return loss, pair
