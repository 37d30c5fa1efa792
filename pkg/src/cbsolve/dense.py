"""Brute-force dense reference.

Assembles the full ``nm x nm`` matrix of any block operator and solves it by
plain Gaussian elimination with partial pivoting. Nothing here calls into
:mod:`cbsolve.block`; the elimination is a separate code path so that a bug
in the block kernels cannot hide behind a matching bug in the oracle.
"""

import numpy as np

from .errors import DimensionError, SingularDenseError

EPS = np.finfo(np.float64).eps


def assemble_dense(op):
    """Place every block of ``op`` at its position in an ``(nm, nm)`` array."""
    n, m = op.n, op.m
    out = np.zeros((n * m, n * m))
    for row, col, blk in op.entries():
        out[row * m:(row + 1) * m, col * m:(col + 1) * m] = blk
    return out


def extract_block(d, m, row, col):
    """Block (row, col), 0-based, of a dense assembly with block order ``m``."""
    return d[row * m:(row + 1) * m, col * m:(col + 1) * m]


def dense_matvec(d, x):
    """``d @ x`` summed column by column in ascending order."""
    d = np.asarray(d, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(d.shape[0])
    for j in range(d.shape[1]):
        out += d[:, j] * x[j]
    return out


def dense_solve(d, f):
    """Solve ``d x = f`` by Gaussian elimination with row pivoting.

    A pivot is rejected when ``|p| <= dim * eps * ||d||_inf``.

    Raises
    ------
    SingularDenseError
        With the 1-based column of the failed pivot.
    """
    a = np.array(d, dtype=np.float64)
    b = np.array(f, dtype=np.float64).ravel()
    dim = a.shape[0]
    if a.shape != (dim, dim) or b.shape != (dim,):
        raise DimensionError(f"dense system {a.shape} with rhs {b.shape}")
    tol = dim * EPS * (np.abs(a).sum(axis=1).max() if dim else 0.0)
    for k in range(dim):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= tol:
            raise SingularDenseError(k + 1)
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        factors = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= np.outer(factors, a[k, k:])
        b[k + 1:] -= factors * b[k]
    x = np.zeros(dim)
    for k in range(dim - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


def dense_solve_operator(op, f):
    """Assemble ``op`` and solve; ``f`` and the result have shape ``(n, m)``."""
    x = dense_solve(assemble_dense(op), np.asarray(f, dtype=np.float64).ravel())
    return x.reshape(op.n, op.m)
