"""Factor-once, solve-many elimination for non-cyclic block banded operators.

Two operator shapes are supported: block tridiagonal (bands -1, 0, +1) and
block penta-diagonal (bands -2..+2). Elimination runs strictly top to
bottom without block-row pivoting; partial pivoting happens only inside each
m x m pivot block.
"""

from dataclasses import dataclass

import numpy as np

from . import _layout
from .block import block_axpy, block_matmul, lu_factor, lu_solve
from .errors import DimensionError, SingularBlockError, SingularPivotError


@dataclass(frozen=True, eq=False)
class BlockTriMatrix:
    """Block tridiagonal matrix.

    ``sub[k]`` sits at block (k+1, k), ``diag[k]`` at (k, k) and ``sup[k]``
    at (k, k+1), all 0-based.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    kind = "tri"
    min_n = 2

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=np.float64)
        if diag.ndim != 3:
            raise DimensionError(f"diag must be an (n, m, m) array, got shape {diag.shape}")
        n = diag.shape[0]
        if n < self.min_n:
            raise DimensionError(f"block tridiagonal operator needs n >= {self.min_n}, got {n}")
        object.__setattr__(self, "diag", _layout.stack(diag, n, name="diag"))
        m = self.diag.shape[1]
        object.__setattr__(self, "sub", _layout.stack(self.sub, n - 1, m, "sub"))
        object.__setattr__(self, "sup", _layout.stack(self.sup, n - 1, m, "sup"))

    @property
    def n(self):
        return self.diag.shape[0]

    @property
    def m(self):
        return self.diag.shape[1]

    def entries(self):
        out = []
        for k in range(self.n):
            if k >= 1:
                out.append((k, k - 1, self.sub[k - 1]))
            out.append((k, k, self.diag[k]))
            if k < self.n - 1:
                out.append((k, k + 1, self.sup[k]))
        return out

    def norm_inf(self):
        return _layout.entries_norm_inf(self.entries(), self.n, self.m)


@dataclass(frozen=True, eq=False)
class BlockPentaMatrix:
    """Block penta-diagonal matrix.

    ``subsub[k]`` sits at block (k+2, k), ``sub[k]`` at (k+1, k),
    ``diag[k]`` at (k, k), ``sup[k]`` at (k, k+1), ``supsup[k]`` at (k, k+2).
    """

    subsub: np.ndarray
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    supsup: np.ndarray

    kind = "penta"
    min_n = 3

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=np.float64)
        if diag.ndim != 3:
            raise DimensionError(f"diag must be an (n, m, m) array, got shape {diag.shape}")
        n = diag.shape[0]
        if n < self.min_n:
            raise DimensionError(f"block penta-diagonal operator needs n >= {self.min_n}, got {n}")
        object.__setattr__(self, "diag", _layout.stack(diag, n, name="diag"))
        m = self.diag.shape[1]
        object.__setattr__(self, "subsub", _layout.stack(self.subsub, n - 2, m, "subsub"))
        object.__setattr__(self, "sub", _layout.stack(self.sub, n - 1, m, "sub"))
        object.__setattr__(self, "sup", _layout.stack(self.sup, n - 1, m, "sup"))
        object.__setattr__(self, "supsup", _layout.stack(self.supsup, n - 2, m, "supsup"))

    @property
    def n(self):
        return self.diag.shape[0]

    @property
    def m(self):
        return self.diag.shape[1]

    def entries(self):
        n = self.n
        out = []
        for k in range(n):
            if k >= 2:
                out.append((k, k - 2, self.subsub[k - 2]))
            if k >= 1:
                out.append((k, k - 1, self.sub[k - 1]))
            out.append((k, k, self.diag[k]))
            if k < n - 1:
                out.append((k, k + 1, self.sup[k]))
            if k < n - 2:
                out.append((k, k + 2, self.supsup[k]))
        return out

    def norm_inf(self):
        return _layout.entries_norm_inf(self.entries(), self.n, self.m)


@dataclass(frozen=True, eq=False)
class BandedFactorization:
    """Block LU factors of a banded operator.

    The operator is written as ``L @ U`` where ``U`` has identity diagonal
    blocks and super-bands ``updated_bands`` (``G`` and, for penta, ``H``),
    and ``L`` has the pivot blocks on its diagonal and the eliminated
    sub-band blocks ``multipliers`` below it. For tri ``multipliers`` is
    ``(A,)``; for penta it is ``(A', E)`` where ``A'`` is the sub band after
    the sub-sub band was eliminated.
    """

    kind: str
    pivot_lus: tuple
    multipliers: tuple
    updated_bands: tuple

    @property
    def n(self):
        return len(self.pivot_lus)

    @property
    def m(self):
        return self.pivot_lus[0].m

    def reconstruct_dense(self):
        """Multiply the factors back together into a dense ``(nm, nm)`` array."""
        n, m = self.n, self.m
        penta = self.kind == "penta"
        upper = np.zeros((n * m, n * m))
        for k in range(n):
            upper[k * m:(k + 1) * m, k * m:(k + 1) * m] = np.eye(m)
            if k < n - 1:
                upper[k * m:(k + 1) * m, (k + 1) * m:(k + 2) * m] = self.updated_bands[0][k]
            if penta and k < n - 2:
                upper[k * m:(k + 1) * m, (k + 2) * m:(k + 3) * m] = self.updated_bands[1][k]
        lower = np.zeros_like(upper)
        for k in range(n):
            lower[k * m:(k + 1) * m, k * m:(k + 1) * m] = self.pivot_lus[k].reconstruct()
            if k >= 1:
                lower[k * m:(k + 1) * m, (k - 1) * m:k * m] = self.multipliers[0][k - 1]
            if penta and k >= 2:
                lower[k * m:(k + 1) * m, (k - 2) * m:(k - 1) * m] = self.multipliers[1][k - 2]
        return lower @ upper


def _frozen(blocks, m):
    arr = np.array(blocks, dtype=np.float64).reshape(len(blocks), m, m)
    arr.flags.writeable = False
    return arr


def factor_banded(a, counter=None):
    """Factor a :class:`BlockTriMatrix` or :class:`BlockPentaMatrix`.

    The operator itself is left untouched; all modified bands live in the
    returned factorization.

    Raises
    ------
    SingularPivotError
        If the pivot block of some block row fails the singularity test.
    """
    if not isinstance(a, (BlockTriMatrix, BlockPentaMatrix)):
        raise TypeError(f"cannot factor {type(a).__name__}")
    penta = isinstance(a, BlockPentaMatrix)
    n, m = a.n, a.m
    pivots, lower, gs, hs = [], [], [], []
    for k in range(n):
        piv = a.diag[k]
        upper = a.sup[k] if k < n - 1 else None
        if k >= 1:
            low = a.sub[k - 1]
            if penta and k >= 2:
                e = a.subsub[k - 2]
                low = block_axpy(-1.0, block_matmul(e, gs[k - 2], counter), low)
                piv = block_axpy(-1.0, block_matmul(e, hs[k - 2], counter), piv)
            piv = block_axpy(-1.0, block_matmul(low, gs[k - 1], counter), piv)
            if penta and upper is not None:
                upper = block_axpy(-1.0, block_matmul(low, hs[k - 1], counter), upper)
            lower.append(low)
        try:
            lu = lu_factor(piv, counter)
        except SingularBlockError as exc:
            raise SingularPivotError(k + 1, exc.column) from None
        pivots.append(lu)
        if upper is not None:
            gs.append(lu_solve(lu, upper, counter))
        if penta and k < n - 2:
            hs.append(lu_solve(lu, a.supsup[k], counter))
    if penta:
        multipliers = (_frozen(lower, m), a.subsub)
        bands = (_frozen(gs, m), _frozen(hs, m))
    else:
        multipliers = (_frozen(lower, m),)
        bands = (_frozen(gs, m),)
    return BandedFactorization(a.kind, tuple(pivots), multipliers, bands)


def solve_banded(f, rhs, counter=None):
    """Apply the inverse of a factored operator to ``rhs``.

    ``rhs`` is either ``(n, m)`` (one block vector) or ``(n, m, k)`` (k
    columns); the result has the same shape. Columns never interact, so a
    multi-column solve matches repeated single solves bit for bit.
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    n, m = f.n, f.m
    if rhs.ndim not in (2, 3) or rhs.shape[:2] != (n, m):
        raise DimensionError(f"rhs shape {rhs.shape} does not match n={n}, m={m}")
    penta = f.kind == "penta"
    y = rhs.copy()
    low = f.multipliers[0]
    for k in range(n):
        r = y[k]
        if penta and k >= 2:
            r = r - block_matmul(f.multipliers[1][k - 2], y[k - 2], counter)
        if k >= 1:
            r = r - block_matmul(low[k - 1], y[k - 1], counter)
        y[k] = lu_solve(f.pivot_lus[k], r, counter)
    g = f.updated_bands[0]
    for k in range(n - 2, -1, -1):
        r = y[k] - block_matmul(g[k], y[k + 1], counter)
        if penta and k < n - 2:
            r = r - block_matmul(f.updated_bands[1][k], y[k + 2], counter)
        y[k] = r
    return y


def apply_banded(a, x):
    """Exact banded matrix-vector product ``a @ x`` for ``x`` of shape ``(n, m)``."""
    return _layout.apply_entries(a.entries(), a.n, a.m, x)
