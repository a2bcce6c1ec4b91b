"""Compiled vs pure-Python kernel timings.

    python3 benchmarks/bench_kernels.py [--repeat N] [--scale S]
"""
import argparse
import time

import numpy as np

from provdistill import _kernels_py
from provdistill import kernels

try:
    from provdistill import _kernels as compiled
except ImportError:
    compiled = None


def csr_inputs(rng, scale):
    n = 20_000 * scale
    m = 200_000 * scale
    return rng.integers(0, n, m), rng.integers(0, n, m), n


def merge_inputs(rng, scale):
    rows, cols, n = csr_inputs(rng, scale)
    ptr_o, _, eid_o = _kernels_py.csr_build(rows, cols, n)
    ptr_i, _, eid_i = _kernels_py.csr_build(cols, rows, n)
    return ptr_o, eid_o, ptr_i, eid_i, np.full(n, 64, dtype=np.int64)


def sgns_inputs(rng, scale):
    V, d, n_tok = 500, 32, 4_000 * scale
    syn0 = (rng.random((V, d)) - 0.5) / d
    syn1 = np.zeros((V, d))
    lengths = rng.integers(5, 40, size=n_tok // 20)
    ptr = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    tokens = rng.integers(1, V, size=ptr[-1]).astype(np.int32)
    win = rng.integers(1, 6, size=ptr[-1]).astype(np.int32)
    sent = np.repeat(np.arange(len(lengths)), lengths)
    pos = np.arange(ptr[-1])
    lo = np.maximum(pos - win, ptr[sent])
    hi = np.minimum(pos + win + 1, ptr[sent + 1])
    negs = rng.integers(1, V, size=(int((hi - lo - 1).sum()), 5)).astype(np.int32)
    return syn0, syn1, tokens, ptr, win, negs


def best_of(fn, args, repeat, copy_first=0):
    times = []
    for _ in range(repeat):
        call = [a.copy() for a in args[:copy_first]] + list(args[copy_first:])
        t = time.perf_counter()
        fn(*call)
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=int, default=1)
    args = ap.parse_args()
    if compiled is None:
        raise SystemExit("compiled extension not built; run pip install -e . first")
    rng = np.random.default_rng(0)
    cases = [
        ("csr_build", csr_inputs(rng, args.scale), 0),
        ("incident_merge", merge_inputs(rng, args.scale), 0),
        ("sgns_block", sgns_inputs(rng, args.scale) + (0.025, 2.5e-6, 0, 10**9), 2),
    ]
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':<16}{'cython s':>11}{'python s':>11}{'speedup':>9}")
    for name, inputs, n_mut in cases:
        fast = best_of(getattr(compiled, name), inputs, args.repeat, n_mut)
        slow = best_of(getattr(_kernels_py, name), inputs, 1 if name == "sgns_block" else args.repeat, n_mut)
        print(f"{name:<16}{fast:>11.4f}{slow:>11.4f}{slow / fast:>8.1f}x")


if __name__ == "__main__":
    main()
