"""Pure-Python (numpy) fallback for the random-indexing update kernel.

Same contract as the compiled version in _ri_kernel.pyx; used when the
extension is unavailable. Updates are exact integer increments, so both
kernels produce bit-identical stores.
"""

import numpy as np


def ri_update(ids, u, v, plus, minus, matrix, counts):
    n = ids.shape[0]
    if n == 0:
        return
    np.add.at(counts, ids, 1)
    for off in range(-u, v + 1):
        if off == 0:
            continue
        if off < 0:
            centers, neighbours = ids[-off:], ids[:off]
        else:
            centers, neighbours = ids[: n - off], ids[off:]
        if centers.size == 0:
            continue
        np.add.at(matrix, (centers[:, None], plus[neighbours]), 1.0)
        np.add.at(matrix, (centers[:, None], minus[neighbours]), -1.0)
