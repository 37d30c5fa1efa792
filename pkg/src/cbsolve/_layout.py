"""Helpers shared by the block operator types.

An operator describes itself as a list of ``(row, col, block)`` triples
(0-based block indices). Products are accumulated per scalar row in
ascending column order, the same order a naive dense matvec uses, so both
give identical bits.
"""

import numpy as np

from .errors import DimensionError, NonFiniteError


def stack(blocks, count, m=None, name="blocks"):
    """Validate and freeze an ``(count, m, m)`` block array."""
    arr = np.array(blocks, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[0] != count or arr.shape[1] != arr.shape[2]:
        raise DimensionError(
            f"{name}: expected {count} square blocks, got array of shape {arr.shape}"
        )
    if m is not None and arr.shape[1] != m:
        raise DimensionError(f"{name}: block order {arr.shape[1]} != {m}")
    if not np.isfinite(arr).all():
        raise NonFiniteError(f"{name}: non-finite entries")
    arr.flags.writeable = False
    return arr


def block_vector(x, n, m, name="vector"):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (n, m):
        if x.shape == (n * m,):
            return x.reshape(n, m)
        raise DimensionError(f"{name}: expected shape ({n}, {m}), got {x.shape}")
    return x


def apply_entries(entries, n, m, x):
    x = block_vector(x, n, m)
    out = np.zeros((n, m))
    for row, col, blk in entries:
        acc = out[row]
        for j in range(m):
            acc += blk[:, j] * x[col, j]
    return out


def entries_norm_inf(entries, n, m):
    rowsums = np.zeros((n, m))
    for row, _, blk in entries:
        rowsums[row] += np.sum(np.abs(blk), axis=1)
    return float(rowsums.max()) if rowsums.size else 0.0
