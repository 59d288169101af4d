#!/usr/bin/env python3
"""Compare the compiled and pure-Python embedding-update kernels.

Trains on identical synthetic token streams with each kernel and reports
wall-clock time plus a bit-exactness check between the resulting stores.

Usage: python benchmarks/bench_kernels.py [--tokens N] [--vocab V]
"""

import argparse
import time

import numpy as np

from streamextract import _ri_kernel_py
from streamextract.embedding import EmbeddingConfig, VectorStore
from streamextract.synth import generate_token_stream

try:
    from streamextract import _ri_kernel
except ImportError:
    _ri_kernel = None


def train_with(kernel, docs, cfg):
    store = VectorStore(cfg)
    start = time.perf_counter()
    for doc in docs:
        ids = np.fromiter((store._id_for(u) for u in doc), dtype=np.int64,
                          count=len(doc))
        kernel.ri_update(ids, cfg.u, cfg.v, store._plus, store._minus,
                         store._matrix, store._counts)
    return store, time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--tokens", type=int, default=1_000_000)
    parser.add_argument("--vocab", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    cfg = EmbeddingConfig(master_seed=args.seed)
    docs = generate_token_stream(args.tokens, vocab_size=args.vocab, seed=args.seed)

    py_store, py_time = train_with(_ri_kernel_py, docs, cfg)
    print(f"python kernel: {py_time:.3f} s "
          f"({args.tokens / py_time / 1e6:.2f} M tokens/s)")

    if _ri_kernel is None:
        print("cython kernel: not built")
        return

    cy_store, cy_time = train_with(_ri_kernel, docs, cfg)
    print(f"cython kernel: {cy_time:.3f} s "
          f"({args.tokens / cy_time / 1e6:.2f} M tokens/s)")
    print(f"speedup: {py_time / cy_time:.1f}x")

    same = (np.array_equal(py_store.matrix(), cy_store.matrix())
            and np.array_equal(py_store._counts[: len(py_store)],
                               cy_store._counts[: len(cy_store)]))
    print(f"bit-identical results: {same}")


if __name__ == "__main__":
    main()
