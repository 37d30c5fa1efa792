"""Woodbury-corrected solvers for cyclic block tri- and penta-diagonal systems.

A cyclic operator ``A`` is split as ``A = Ã + U Vᵀ`` (tridiagonal) or
``A = Ã + U Vᵀ + P Qᵀ`` (penta-diagonal) where ``Ã`` is a non-cyclic banded
operator and the low-rank terms carry the corner blocks. The solve factors
``Ã`` once, pushes the few nonzero columns of ``U`` (and ``P``) and the
right-hand side through it, and restores the cyclic coupling with a small
m x m or 2m x 2m capacitance system.

Block row ``k`` (1-based) holds ``E_k, A_k, B_k, C_k, D_k`` at block columns
``k-2, k-1, k, k+1, k+2`` taken modulo ``n``; the corner blocks are the ones
that wrap around.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _layout
from .banded import BlockPentaMatrix, BlockTriMatrix, factor_banded, solve_banded
from .block import OpCounter, block_axpy, block_matmul, lu_factor, lu_solve
from .errors import DimensionError, SingularBlockError, SingularCapacitanceError


@dataclass(frozen=True)
class WoodburyParams:
    """The free nonzero scalars of the corner splitting.

    ``alpha`` and ``gamma`` scale the first and last rows of ``U``; ``beta``
    and ``delta`` scale the second and second-to-last rows of ``P``. The
    exact solution does not depend on them.
    """

    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    delta: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v == 0.0:
                raise ValueError(f"{name} must be finite and nonzero, got {v!r}")
            object.__setattr__(self, name, v)


class _CyclicBase:
    offsets = ()

    def _init_bands(self, min_n, label):
        b = np.asarray(self.b, dtype=np.float64)
        if b.ndim != 3:
            raise DimensionError(f"b must be an (n, m, m) array, got shape {b.shape}")
        n = b.shape[0]
        if n < min_n:
            raise DimensionError(
                f"{label} needs n >= {min_n} so that corner and band blocks occupy "
                f"distinct columns, got n={n}"
            )
        m = b.shape[1]
        for name, _ in self.offsets:
            object.__setattr__(self, name, _layout.stack(getattr(self, name), n, m, name))

    @property
    def n(self):
        return self.b.shape[0]

    @property
    def m(self):
        return self.b.shape[1]

    def block(self, row, col):
        """Block at 0-based position (row, col), or ``None`` if structurally zero."""
        for name, off in self.offsets:
            if (row + off) % self.n == col:
                return getattr(self, name)[row]
        return None

    def entries(self):
        n = self.n
        out = []
        for k in range(n):
            row = [((k + off) % n, getattr(self, name)[k]) for name, off in self.offsets]
            row.sort(key=lambda t: t[0])
            out.extend((k, col, blk) for col, blk in row)
        return out

    def norm_inf(self):
        return _layout.entries_norm_inf(self.entries(), self.n, self.m)


@dataclass(frozen=True, eq=False)
class CyclicBlockTri(_CyclicBase):
    """Cyclic block tridiagonal operator.

    ``a[k]``, ``b[k]``, ``c[k]`` are ``A_{k+1}``, ``B_{k+1}``, ``C_{k+1}``;
    ``a[0]`` is the top-right corner and ``c[n-1]`` the bottom-left one.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    kind = "cbts"
    min_n = 3
    offsets = (("a", -1), ("b", 0), ("c", 1))

    def __post_init__(self):
        self._init_bands(self.min_n, "cyclic block tridiagonal operator")


@dataclass(frozen=True, eq=False)
class CyclicBlockPenta(_CyclicBase):
    """Cyclic block penta-diagonal operator.

    Corners: ``e[0]``, ``a[0]`` (row 1, columns n-1, n); ``e[1]`` (row 2,
    column n); ``d[n-2]`` (row n-1, column 1); ``c[n-1]``, ``d[n-1]``
    (row n, columns 1, 2).
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    e: np.ndarray

    kind = "cbps"
    min_n = 5
    offsets = (("e", -2), ("a", -1), ("b", 0), ("c", 1), ("d", 2))

    def __post_init__(self):
        self._init_bands(self.min_n, "cyclic block penta-diagonal operator")


def apply_cyclic(sys, x):
    """Exact cyclic matvec ``A @ x`` for ``x`` of shape ``(n, m)``, corners included."""
    return _layout.apply_entries(sys.entries(), sys.n, sys.m, x)


def _block_column(n, m, rows):
    """Stack of n blocks, zero except ``rows[i] -> block``."""
    out = np.zeros((n, m, m))
    for i, blk in rows.items():
        out[i] = blk
    return out


@dataclass(frozen=True, eq=False)
class CbtsDecomposition:
    """``A = Ã + U Vᵀ`` for a cyclic block tridiagonal ``A``.

    Only the nonzero blocks of ``U`` (rows 1, n) and ``V`` (rows 1, n) are
    kept; ``x1``/``xn`` are the corrections removed from ``B_1``/``B_n``.
    """

    a_tilde: BlockTriMatrix
    u1: np.ndarray
    un: np.ndarray
    v1: np.ndarray
    vn: np.ndarray
    x1: np.ndarray
    xn: np.ndarray

    def u_stack(self):
        n = self.a_tilde.n
        return _block_column(n, self.a_tilde.m, {0: self.u1, n - 1: self.un})

    def v_stack(self):
        n = self.a_tilde.n
        return _block_column(n, self.a_tilde.m, {0: self.v1, n - 1: self.vn})


@dataclass(frozen=True, eq=False)
class CbpsDecomposition:
    """``A = Ã + U Vᵀ + P Qᵀ`` for a cyclic block penta-diagonal ``A``.

    ``U`` is nonzero in rows 1 and n, ``V`` in rows 1, 2, n-1, n; ``P`` in
    rows 2 and n-1, ``Q`` in rows 1 and n.
    """

    a_tilde: BlockPentaMatrix
    u1: np.ndarray
    un: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    v_nm1: np.ndarray
    vn: np.ndarray
    p2: np.ndarray
    p_nm1: np.ndarray
    q1: np.ndarray
    qn: np.ndarray
    x1: np.ndarray
    y1: np.ndarray
    xn: np.ndarray
    yn: np.ndarray
    x2: np.ndarray
    x_nm1: np.ndarray

    def u_stack(self):
        n = self.a_tilde.n
        return _block_column(n, self.a_tilde.m, {0: self.u1, n - 1: self.un})

    def v_stack(self):
        n = self.a_tilde.n
        return _block_column(
            n, self.a_tilde.m, {0: self.v1, 1: self.v2, n - 2: self.v_nm1, n - 1: self.vn}
        )

    def p_stack(self):
        n = self.a_tilde.n
        return _block_column(n, self.a_tilde.m, {1: self.p2, n - 2: self.p_nm1})

    def q_stack(self):
        n = self.a_tilde.n
        return _block_column(n, self.a_tilde.m, {0: self.q1, n - 1: self.qn})


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Result of one solve.

    ``residual_inf`` is ``||Ax - f|| / (||A|| ||x|| + ||f||)`` in the
    infinity norm. ``capacitance`` is the small matrix ``M`` that was
    factored (``None`` for non-cyclic or dense solves).
    """

    x: np.ndarray
    residual_inf: float
    params: WoodburyParams
    counters: OpCounter = field(default_factory=OpCounter)
    capacitance: np.ndarray = None


def residual_inf(op, x, f):
    """Scale-free residual of ``op @ x = f``; ``op`` is any block operator."""
    n, m = op.n, op.m
    x = _layout.block_vector(x, n, m, "x")
    f = _layout.block_vector(f, n, m, "f")
    r = _layout.apply_entries(op.entries(), n, m, x) - f
    denom = op.norm_inf() * float(np.max(np.abs(x))) + float(np.max(np.abs(f)))
    num = float(np.max(np.abs(r)))
    if denom == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / denom


def decompose_cbts(sys, p=WoodburyParams()):
    """Split a :class:`CyclicBlockTri` into ``Ã + U Vᵀ``.

    ``U_1 = I/alpha``, ``V_n = alpha A_1``, ``U_n = I/gamma``,
    ``V_1 = gamma C_n``; hence ``X_1 = (gamma/alpha) C_n`` and
    ``X_n = (alpha/gamma) A_1`` are removed from the first and last
    diagonal blocks.
    """
    n, m = sys.n, sys.m
    al, ga = p.alpha, p.gamma
    eye = np.eye(m)
    a1, cn = sys.a[0], sys.c[n - 1]
    u1, un = eye / al, eye / ga
    v1, vn = ga * cn, al * a1
    # (gamma/alpha) C_n and (alpha/gamma) A_1, formed as the products they must equal
    x1 = block_matmul(u1, v1)
    xn = block_matmul(un, vn)
    diag = np.array(sys.b)
    diag[0] = block_axpy(-1.0, x1, diag[0])
    diag[n - 1] = block_axpy(-1.0, xn, diag[n - 1])
    a_tilde = BlockTriMatrix(sub=sys.a[1:], diag=diag, sup=sys.c[:-1])
    return CbtsDecomposition(a_tilde, u1, un, v1, vn, x1, xn)


def decompose_cbps(sys, p=WoodburyParams()):
    """Split a :class:`CyclicBlockPenta` into ``Ã + U Vᵀ + P Qᵀ``.

    ``U Vᵀ`` restores the corners of rows 1 and n, ``P Qᵀ`` those of rows 2
    and n-1. Each correction block is formed as the product that defines
    it, e.g. ``X_n = U_n V_n = (alpha/gamma) A_1`` and
    ``X_2 = P_2 Q_1 = (delta/beta) D_{n-1}``.
    """
    n, m = sys.n, sys.m
    al, be, ga, de = p.alpha, p.beta, p.gamma, p.delta
    eye = np.eye(m)
    a1, e1, e2 = sys.a[0], sys.e[0], sys.e[1]
    cn, dn, d_nm1 = sys.c[n - 1], sys.d[n - 1], sys.d[n - 2]

    u1, un = eye / al, eye / ga
    v1, v2 = ga * cn, ga * dn
    v_nm1, vn = al * e1, al * a1
    x1 = block_matmul(u1, v1)
    y1 = block_matmul(u1, v2)
    yn = block_matmul(un, v_nm1)
    xn = block_matmul(un, vn)

    p2, p_nm1 = eye / be, eye / de
    q1, qn = de * d_nm1, be * e2
    x2 = block_matmul(p2, q1)
    x_nm1 = block_matmul(p_nm1, qn)

    diag = np.array(sys.b)
    diag[0] = block_axpy(-1.0, x1, diag[0])
    diag[n - 1] = block_axpy(-1.0, xn, diag[n - 1])
    sup = np.array(sys.c[:-1])
    sup[0] = block_axpy(-1.0, y1, sup[0])
    sup[n - 2] = block_axpy(-1.0, x_nm1, sup[n - 2])
    sub = np.array(sys.a[1:])
    sub[0] = block_axpy(-1.0, x2, sub[0])
    sub[n - 2] = block_axpy(-1.0, yn, sub[n - 2])
    a_tilde = BlockPentaMatrix(
        subsub=sys.e[2:], sub=sub, diag=diag, sup=sup, supsup=sys.d[:-2]
    )
    return CbpsDecomposition(
        a_tilde, u1, un, v1, v2, v_nm1, vn, p2, p_nm1, q1, qn,
        x1, y1, xn, yn, x2, x_nm1,
    )


def _factor_capacitance(cap, counter):
    try:
        return lu_factor(cap, counter)
    except SingularBlockError as exc:
        raise SingularCapacitanceError(cap.shape[0], exc.column) from None


def solve_cbts(sys, f, p=WoodburyParams()):
    """Solve a cyclic block tridiagonal system ``A x = f``.

    Parameters
    ----------
    sys : CyclicBlockTri
    f : array_like, shape (n, m)
    p : WoodburyParams, optional
        Only ``alpha`` and ``gamma`` are used.

    Returns
    -------
    SolveReport

    Raises
    ------
    SingularPivotError
        ``Ã`` could not be eliminated.
    SingularCapacitanceError
        The m x m matrix ``I + Vᵀ Z`` is singular.
    """
    n, m = sys.n, sys.m
    f = _layout.block_vector(f, n, m, "f")
    counter = OpCounter()
    dec = decompose_cbts(sys, p)
    fac = factor_banded(dec.a_tilde, counter)

    # columns 0..m-1 carry U, column m carries f
    rhs = np.zeros((n, m, m + 1))
    rhs[0, :, :m] = dec.u1
    rhs[n - 1, :, :m] = dec.un
    rhs[:, :, m] = f
    sol = solve_banded(fac, rhs, counter)
    z, y = sol[:, :, :m], sol[:, :, m]
    assert z.shape == (n, m, m)

    cap = np.eye(m) + block_matmul(dec.v1, z[0], counter) + block_matmul(dec.vn, z[n - 1], counter)
    vty = block_matmul(dec.v1, y[0], counter) + block_matmul(dec.vn, y[n - 1], counter)
    assert cap.shape == (m, m)
    u = lu_solve(_factor_capacitance(cap, counter), vty, counter)

    x = np.empty((n, m))
    for k in range(n):
        x[k] = y[k] - block_matmul(z[k], u, counter)
    return SolveReport(x, residual_inf(sys, x, f), p, counter, cap)


def solve_cbps(sys, f, p=WoodburyParams()):
    """Solve a cyclic block penta-diagonal system ``A x = f``.

    ``u`` and ``v`` come from one stacked 2m x 2m solve
    ``M [u; v] = [Vᵀ y; Qᵀ y]`` with
    ``M = [[I + VᵀZ, VᵀW], [QᵀZ, I + QᵀW]]``; then
    ``x_k = y_k - Z_k u - W_k v``.

    Raises
    ------
    SingularPivotError
        ``Ã`` could not be eliminated.
    SingularCapacitanceError
        The 2m x 2m matrix ``M`` is singular.
    """
    n, m = sys.n, sys.m
    f = _layout.block_vector(f, n, m, "f")
    counter = OpCounter()
    dec = decompose_cbps(sys, p)
    fac = factor_banded(dec.a_tilde, counter)

    # columns [0, m) carry U, [m, 2m) carry P, column 2m carries f
    rhs = np.zeros((n, m, 2 * m + 1))
    rhs[0, :, :m] = dec.u1
    rhs[n - 1, :, :m] = dec.un
    rhs[1, :, m:2 * m] = dec.p2
    rhs[n - 2, :, m:2 * m] = dec.p_nm1
    rhs[:, :, 2 * m] = f
    sol = solve_banded(fac, rhs, counter)
    zw, y = sol[:, :, :2 * m], sol[:, :, 2 * m]
    assert zw.shape == (n, m, 2 * m)

    def vt(cols):
        return (
            block_matmul(dec.v1, cols[0], counter)
            + block_matmul(dec.v2, cols[1], counter)
            + block_matmul(dec.v_nm1, cols[n - 2], counter)
            + block_matmul(dec.vn, cols[n - 1], counter)
        )

    def qt(cols):
        return block_matmul(dec.q1, cols[0], counter) + block_matmul(dec.qn, cols[n - 1], counter)

    cap = np.eye(2 * m) + np.vstack([vt(zw), qt(zw)])
    assert cap.shape == (2 * m, 2 * m)
    uv = lu_solve(_factor_capacitance(cap, counter), np.concatenate([vt(y), qt(y)]), counter)

    x = np.empty((n, m))
    for k in range(n):
        x[k] = y[k] - block_matmul(zw[k], uv, counter)
    return SolveReport(x, residual_inf(sys, x, f), p, counter, cap)
