"""Exception hierarchy shared by all solver modules."""

import numpy as np


class CbsError(Exception):
    """Base class for every error raised by cbsolve."""


class DimensionError(CbsError, ValueError):
    """Shapes or block counts do not fit together."""


class NonFiniteError(CbsError, ValueError):
    """A NaN or infinity reached an operator or right-hand side."""


class FormatError(CbsError, ValueError):
    """Malformed CBX1 input.

    ``token`` is the 1-based index of the offending token, when known.
    """

    def __init__(self, message, token=None):
        self.token = token
        if token is not None:
            message = f"token {token}: {message}"
        super().__init__(message)


class SingularError(CbsError, np.linalg.LinAlgError):
    """Base for all numerical singularity failures (CLI exit code 2)."""


class SingularBlockError(SingularError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"singular block: pivot failed at column {column}")


class SingularPivotError(SingularError):
    """The non-cyclic operator could not be eliminated at ``block_row`` (1-based)."""

    def __init__(self, block_row, column=None):
        self.block_row = block_row
        self.column = column
        super().__init__(f"singular pivot block at block row {block_row}")


class SingularCapacitanceError(SingularError):
    """The small correction (capacitance) matrix is singular."""

    def __init__(self, order, column=None):
        self.order = order
        self.column = column
        super().__init__(
            f"singular {order}x{order} capacitance matrix (pivot column {column})"
        )


class SingularDenseError(SingularError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"dense elimination failed at column {column}")
