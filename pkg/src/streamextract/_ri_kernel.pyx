# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner loop for incremental random-indexing training.

For every token occurrence, the sparse ternary context vectors of its
window neighbours are accumulated into the occupant unit's representation
row. All updates are +/-1 integer increments on float64 storage, so the
result is exact and order-independent.
"""

import numpy as np

cimport numpy as cnp


def ri_update(cnp.int64_t[::1] ids, int u, int v,
              cnp.int32_t[:, ::1] plus, cnp.int32_t[:, ::1] minus,
              cnp.float64_t[:, ::1] matrix, cnp.int64_t[::1] counts):
    """Process one document's unit ids in-place.

    ids    -- unit id per token position, document order
    u, v   -- window sizes before/after the focus position
    plus   -- per-unit +1 context indices, shape (vocab, nnz)
    minus  -- per-unit -1 context indices, shape (vocab, nnz)
    matrix -- representation rows, shape (>=vocab, d)
    counts -- per-unit occurrence counts
    """
    cdef Py_ssize_t n = ids.shape[0]
    cdef Py_ssize_t nnz = plus.shape[1]
    cdef Py_ssize_t i, j, t, lo, hi
    cdef cnp.int64_t row, unit

    for i in range(n):
        row = ids[i]
        counts[row] += 1
        lo = i - u if i - u > 0 else 0
        hi = i + v if i + v < n - 1 else n - 1
        for j in range(lo, hi + 1):
            if j == i:
                continue
            unit = ids[j]
            for t in range(nnz):
                matrix[row, plus[unit, t]] += 1.0
                matrix[row, minus[unit, t]] -= 1.0
