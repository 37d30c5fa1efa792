"""Solvers for cyclic block tridiagonal and penta-diagonal linear systems.

The cyclic operator is split into a non-cyclic banded part plus a low-rank
corner correction; the banded part is eliminated block by block and the
correction is folded back in through a small capacitance system (Woodbury
identity).
"""

from .banded import (
    BandedFactorization,
    BlockPentaMatrix,
    BlockTriMatrix,
    apply_banded,
    factor_banded,
    solve_banded,
)
from .block import BlockLU, OpCounter, block_axpy, block_matmul, lu_factor, lu_solve
from .cbx import CbxDocument, GenSpec, generate, parse_cbx, read_cbx, save_cbx, write_cbx
from .cyclic import (
    CbpsDecomposition,
    CbtsDecomposition,
    CyclicBlockPenta,
    CyclicBlockTri,
    SolveReport,
    WoodburyParams,
    apply_cyclic,
    decompose_cbps,
    decompose_cbts,
    residual_inf,
    solve_cbps,
    solve_cbts,
)
from .dense import assemble_dense, dense_solve, dense_solve_operator
from .errors import (
    CbsError,
    DimensionError,
    FormatError,
    NonFiniteError,
    SingularBlockError,
    SingularCapacitanceError,
    SingularDenseError,
    SingularError,
    SingularPivotError,
)
from .solve import solve_operator

__version__ = "0.1.0"
