"""The compiled kernels and the pure-Python fallback must agree."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from provdistill import _kernels_py, featurize, kernels

cy = pytest.importorskip("provdistill._kernels")


def test_backend_selected():
    assert kernels.BACKEND == "cython"


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 12), st.lists(st.tuples(st.integers(0, 11), st.integers(0, 11)), max_size=60))
def test_csr_build_agrees(n, pairs):
    pairs = [(u % n, v % n) for u, v in pairs]
    rows = np.array([p[0] for p in pairs], dtype=np.int64)
    cols = np.array([p[1] for p in pairs], dtype=np.int64)
    a = cy.csr_build(rows, cols, n)
    b = _kernels_py.csr_build(rows, cols, n)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(np.asarray(x), y)
    indptr, col, edge = b
    assert indptr[-1] == len(pairs)
    np.testing.assert_array_equal(col, cols[edge])


def test_csr_build_rejects_bad_rows():
    for impl in (cy, _kernels_py):
        with pytest.raises(IndexError):
            impl.csr_build(np.array([3], dtype=np.int64), np.array([0], dtype=np.int64), 2)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 8), st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=40),
       st.lists(st.integers(0, 50), min_size=8, max_size=8))
def test_incident_merge_agrees(n, pairs, caps):
    pairs = [(u % n, v % n) for u, v in pairs]
    src = np.array([p[0] for p in pairs], dtype=np.int64)
    dst = np.array([p[1] for p in pairs], dtype=np.int64)
    op, _, oe = _kernels_py.csr_build(src, dst, n)
    ip, _, ie = _kernels_py.csr_build(dst, src, n)
    caps = np.array(caps[:n], dtype=np.int64)
    a = cy.incident_merge(op, oe, ip, ie, caps)
    b = _kernels_py.incident_merge(op, oe, ip, ie, caps)
    np.testing.assert_array_equal(np.asarray(a[0]), b[0])
    np.testing.assert_array_equal(np.asarray(a[1]), b[1])


def _sgns_inputs(seed):
    rng = np.random.default_rng(seed)
    V, d = 9, 6
    syn0 = (rng.random((V, d)) - 0.5) / d
    syn1 = rng.normal(scale=0.1, size=(V, d))
    lengths = rng.integers(1, 7, size=5)
    ptr = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    tokens = rng.integers(1, V, size=ptr[-1]).astype(np.int32)
    win = rng.integers(1, 4, size=ptr[-1]).astype(np.int32)
    n_pairs = sum(min(i + w + 1, ptr[s + 1]) - max(i - w, ptr[s]) - 1
                  for s in range(5) for i, w in zip(range(ptr[s], ptr[s + 1]), win[ptr[s]:ptr[s + 1]]))
    negs = rng.integers(1, V, size=(n_pairs, 3)).astype(np.int32)
    return syn0, syn1, tokens, ptr, win, negs


@pytest.mark.parametrize("seed", range(10))
def test_sgns_block_agrees(seed):
    syn0, syn1, tokens, ptr, win, negs = _sgns_inputs(seed)
    a0, a1 = syn0.copy(), syn1.copy()
    b0, b1 = syn0.copy(), syn1.copy()
    la, pa = cy.sgns_block(a0, a1, tokens, ptr, win, negs, 0.05, 1e-5, 3, 100)
    lb, pb = _kernels_py.sgns_block(b0, b1, tokens, ptr, win, negs, 0.05, 1e-5, 3, 100)
    assert pa == pb == len(negs)
    assert la == pytest.approx(lb, rel=1e-10)
    np.testing.assert_allclose(a0, b0, rtol=1e-10, atol=1e-13)
    np.testing.assert_allclose(a1, b1, rtol=1e-10, atol=1e-13)


def test_skipgram_training_agrees(monkeypatch):
    corpus = [["a", "b", "c", "a"], ["b", "d"], ["c", "c", "e", "a", "b"]] * 10
    fast = featurize.train_skipgram(corpus, dim=8, epochs=2, seed=5)
    monkeypatch.setattr(featurize.kernels, "sgns_block", _kernels_py.sgns_block)
    slow = featurize.train_skipgram(corpus, dim=8, epochs=2, seed=5)
    np.testing.assert_allclose(fast.vectors, slow.vectors, rtol=1e-5, atol=1e-6)
    np.testing.assert_allclose(fast.loss_trace, slow.loss_trace, rtol=1e-9)
