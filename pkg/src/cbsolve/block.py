"""Dense m x m block kernels.

Every piece of scalar floating-point matrix arithmetic used by the banded and
cyclic solvers goes through this module. Blocks are plain ``float64`` numpy
arrays of shape ``(m, m)``; small vectors are arrays of shape ``(m,)`` and
multi-column right-hand sides have shape ``(m, k)``.

The kernels are written as short loops over the block order so that every
output column is computed independently and in a fixed summation order. This
keeps results bit-reproducible and makes a k-column solve identical,
column for column, to k single-column solves.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NonFiniteError, SingularBlockError

EPS = np.finfo(np.float64).eps


@dataclass
class OpCounter:
    """Block operation tally for one solve; never shared between solves."""

    matmuls: int = 0
    lus: int = 0
    solves: int = 0

    def copy(self):
        return OpCounter(self.matmuls, self.lus, self.solves)


def as_block(a, m=None):
    """Validate ``a`` as a finite square float64 block and return it."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a square block, got shape {a.shape}")
    if m is not None and a.shape[0] != m:
        raise DimensionError(f"expected block order {m}, got {a.shape[0]}")
    if not np.isfinite(a).all():
        raise NonFiniteError("block contains non-finite entries")
    return a


def norm_inf(a):
    """Maximum absolute row sum (0 for an empty array)."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    if a.ndim == 1:
        return float(np.max(np.abs(a)))
    return float(np.max(np.sum(np.abs(a), axis=-1)))


def _rows_match(m, b):
    if b.ndim not in (1, 2) or b.shape[0] != m:
        raise DimensionError(f"operand with shape {b.shape} does not match block order {m}")


def block_matmul(a, b, counter=None):
    """Return ``a @ b`` for a block ``a`` and a block, vector or multi-column ``b``.

    ``a`` may also be a rectangular row of blocks such as ``[Z_k, W_k]``.

    The sum over the inner index runs in ascending order with separate
    multiply and add steps, so the result equals the textbook triple loop
    exactly.
    """
    if a.ndim != 2:
        raise DimensionError(f"left operand must be 2-D, got shape {a.shape}")
    inner = a.shape[1]
    _rows_match(inner, b)
    if counter is not None:
        counter.matmuls += 1
    if b.ndim == 1:
        out = np.zeros(a.shape[0])
        for k in range(inner):
            out += a[:, k] * b[k]
        return out
    out = np.zeros((a.shape[0], b.shape[1]))
    for k in range(inner):
        out += a[:, k, None] * b[k]
    return out


def block_axpy(alpha, a, b):
    """Return ``alpha * a + b`` entrywise."""
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return alpha * a + b


@dataclass(frozen=True)
class BlockLU:
    """LU factors of one block with partial row pivoting.

    ``lu`` holds the unit lower factor strictly below the diagonal and the
    upper factor on and above it. ``perm`` is the 0-based row permutation:
    row ``i`` of ``P @ a`` is row ``perm[i]`` of ``a``.
    """

    lu: np.ndarray
    perm: np.ndarray

    @property
    def m(self):
        return self.lu.shape[0]

    @property
    def lower(self):
        return np.tril(self.lu, -1) + np.eye(self.m)

    @property
    def upper(self):
        return np.triu(self.lu)

    def reconstruct(self):
        """Rebuild the factored block from its factors."""
        pa = self.lower @ self.upper
        out = np.empty_like(pa)
        out[self.perm] = pa
        return out


def lu_factor(a, counter=None):
    """Factor a block with partial pivoting.

    A pivot ``p`` is rejected when ``|p| <= m * eps * ||a||_inf``.

    Raises
    ------
    SingularBlockError
        With the 1-based column of the first rejected pivot.
    """
    a = as_block(a)
    m = a.shape[0]
    if counter is not None:
        counter.lus += 1
    tol = m * EPS * norm_inf(a)
    lu = a.copy()
    perm = np.arange(m)
    for k in range(m):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= tol:
            raise SingularBlockError(k + 1)
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= lu[k + 1:, k, None] * lu[k, k + 1:]
    lu.flags.writeable = False
    perm.flags.writeable = False
    return BlockLU(lu, perm)


def lu_solve(f, rhs, counter=None):
    """Solve ``block @ s = rhs`` using the factors ``f``.

    ``rhs`` may be a vector of length m or an ``(m, k)`` array; the result
    has the same shape.
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    m = f.m
    _rows_match(m, rhs)
    if counter is not None:
        counter.solves += 1
    lu = f.lu
    s = rhs[f.perm].copy()
    vec = s.ndim == 1
    if vec:
        s = s[:, None]
    for j in range(m - 1):
        s[j + 1:] -= lu[j + 1:, j, None] * s[j]
    for j in range(m - 1, -1, -1):
        s[j] /= lu[j, j]
        s[:j] -= lu[:j, j, None] * s[j]
    return s[:, 0] if vec else s
