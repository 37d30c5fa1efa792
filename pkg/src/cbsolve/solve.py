"""One entry point that solves any supported operator by either method."""

import numpy as np

from . import _layout
from .banded import BlockPentaMatrix, BlockTriMatrix, factor_banded, solve_banded
from .block import OpCounter
from .cyclic import (
    CyclicBlockPenta,
    CyclicBlockTri,
    SolveReport,
    WoodburyParams,
    residual_inf,
    solve_cbps,
    solve_cbts,
)
from .dense import dense_solve_operator

METHODS = ("woodbury", "dense")


def solve_operator(op, f, params=WoodburyParams(), method="woodbury"):
    """Solve ``op x = f`` and return a :class:`SolveReport`.

    ``method="woodbury"`` uses the structured path (plain banded elimination
    for non-cyclic operators); ``method="dense"`` uses the brute-force
    oracle and reports zero block counters.
    """
    f = _layout.block_vector(f, op.n, op.m, "f")
    if method == "dense":
        x = dense_solve_operator(op, f)
        return SolveReport(x, residual_inf(op, x, f), params, OpCounter())
    if method != "woodbury":
        raise ValueError(f"unknown method {method!r}")
    if isinstance(op, CyclicBlockTri):
        return solve_cbts(op, f, params)
    if isinstance(op, CyclicBlockPenta):
        return solve_cbps(op, f, params)
    if isinstance(op, (BlockTriMatrix, BlockPentaMatrix)):
        counter = OpCounter()
        x = solve_banded(factor_banded(op, counter), f, counter)
        return SolveReport(x, residual_inf(op, x, f), params, counter)
    raise TypeError(f"not a block operator: {type(op).__name__}")


def relative_deviation(x, ref):
    """``||x - ref||_inf / ||ref||_inf`` (absolute when ``ref`` is zero)."""
    x = np.asarray(x, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    scale = float(np.max(np.abs(ref)))
    diff = float(np.max(np.abs(x - ref)))
    return diff / scale if scale > 0 else diff
