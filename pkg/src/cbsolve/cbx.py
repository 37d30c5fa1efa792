"""CBX1 text format and random system generator.

A CBX1 file is a stream of ASCII-whitespace separated tokens; ``#`` starts a
comment that runs to the end of the line::

    CBX1 <kind> <n> <m>
    <payload>
    [RHS <n*m reals>]
    [SOL <n*m reals>]

``kind`` is one of ``cbts``, ``cbps``, ``tri``, ``penta``. The payload lists,
for k = 1..n, the blocks A_k B_k C_k (``cbts``/``tri``) or A_k B_k C_k D_k E_k
(``cbps``/``penta``), each row-major. Non-cyclic kinds store their absent
corner blocks as zeros so every kind shares one layout.
"""

import math
from dataclasses import dataclass

import numpy as np

from .banded import BlockPentaMatrix, BlockTriMatrix
from .cyclic import CyclicBlockPenta, CyclicBlockTri
from .errors import DimensionError, FormatError, NonFiniteError

MAGIC = "CBX1"
KINDS = ("cbts", "cbps", "tri", "penta")
MIN_N = {"cbts": 3, "cbps": 5, "tri": 2, "penta": 3}
_NBLOCKS = {"cbts": 3, "tri": 3, "cbps": 5, "penta": 5}


@dataclass
class CbxDocument:
    operator: object
    rhs: np.ndarray = None
    solution: np.ndarray = None

    @property
    def kind(self):
        return self.operator.kind


def _corner_positions(kind, n):
    """(band index, k) pairs that are corners, i.e. zero for non-cyclic kinds.

    Band index follows the per-k payload order A, B, C, D, E.
    """
    if kind in ("cbts", "tri"):
        return [(0, 0), (2, n - 1)]
    return [(0, 0), (4, 0), (4, 1), (3, n - 2), (2, n - 1), (3, n - 1)]


def operator_bands(op):
    """Per-k payload bands ``(A, B, C[, D, E])`` each of shape ``(n, m, m)``."""
    if isinstance(op, CyclicBlockTri):
        return [op.a, op.b, op.c]
    if isinstance(op, CyclicBlockPenta):
        return [op.a, op.b, op.c, op.d, op.e]
    n, m = op.n, op.m
    z = np.zeros((1, m, m))
    if isinstance(op, BlockTriMatrix):
        return [
            np.concatenate([z, op.sub]),
            op.diag,
            np.concatenate([op.sup, z]),
        ]
    if isinstance(op, BlockPentaMatrix):
        return [
            np.concatenate([z, op.sub]),
            op.diag,
            np.concatenate([op.sup, z]),
            np.concatenate([op.supsup, z, z]),
            np.concatenate([z, z, op.subsub]),
        ]
    raise TypeError(f"not a block operator: {type(op).__name__}")


def operator_from_bands(kind, bands):
    a = bands[0]
    n = a.shape[0]
    if kind == "cbts":
        return CyclicBlockTri(*bands)
    if kind == "cbps":
        return CyclicBlockPenta(*bands)
    if kind == "tri":
        return BlockTriMatrix(sub=bands[0][1:], diag=bands[1], sup=bands[2][:n - 1])
    if kind == "penta":
        return BlockPentaMatrix(
            subsub=bands[4][2:], sub=bands[0][1:], diag=bands[1],
            sup=bands[2][:n - 1], supsup=bands[3][:n - 2],
        )
    raise ValueError(f"unknown kind {kind!r}")


def _fmt(v):
    return format(float(v), ".17g")


def write_cbx(op, rhs=None, solution=None):
    """Serialize an operator (plus optional RHS and solution) to CBX1 text.

    Output is deterministic and round-trips value-exactly through
    :func:`parse_cbx`.
    """
    n, m = op.n, op.m
    names = "ABCDE"
    lines = [f"{MAGIC} {op.kind} {n} {m}"]
    bands = operator_bands(op)
    for k in range(n):
        lines.append(f"# k={k + 1}")
        for name, band in zip(names, bands):
            lines.append(" ".join(_fmt(v) for v in band[k].ravel()) + f"  # {name}")
    for tag, vec in (("RHS", rhs), ("SOL", solution)):
        if vec is not None:
            vec = np.asarray(vec, dtype=np.float64).reshape(n, m)
            lines.append(tag)
            lines.extend(" ".join(_fmt(v) for v in row) for row in vec)
    return "\n".join(lines) + "\n"


def _tokens(text):
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii")
    out = []
    for line in text.splitlines():
        out.extend(line.split("#", 1)[0].split())
    return out


class _Reader:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def more(self):
        return self.pos < len(self.tokens)

    def next(self, what):
        if not self.more():
            raise FormatError(f"unexpected end of input, expected {what}", self.pos + 1)
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def int(self, what):
        tok = self.next(what)
        try:
            v = int(tok)
        except ValueError:
            raise FormatError(f"expected integer {what}, got {tok!r}", self.pos) from None
        if v < 1:
            raise FormatError(f"{what} must be positive, got {v}", self.pos)
        return v

    def reals(self, count, what):
        out = np.empty(count)
        for i in range(count):
            tok = self.next(what)
            try:
                v = float(tok)
            except ValueError:
                raise FormatError(f"expected real in {what}, got {tok!r}", self.pos) from None
            if not math.isfinite(v):
                raise NonFiniteError(f"token {self.pos}: non-finite value {tok!r} in {what}")
            out[i] = v
        return out


def parse_cbx(text):
    """Parse CBX1 text into a :class:`CbxDocument`.

    Raises
    ------
    FormatError
        Bad magic, unknown kind, malformed or missing tokens, trailing data,
        or nonzero corner blocks in a non-cyclic kind. Carries the 1-based
        token index.
    DimensionError
        ``n`` below the minimum for the kind.
    NonFiniteError
        NaN or infinite payload values.
    """
    r = _Reader(_tokens(text))
    magic = r.next("magic")
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC}", 1)
    kind = r.next("kind")
    if kind not in KINDS:
        raise FormatError(f"unknown kind {kind!r}", 2)
    n = r.int("n")
    m = r.int("m")
    if n < MIN_N[kind]:
        raise DimensionError(f"kind {kind} needs n >= {MIN_N[kind]}, got {n}")
    nb = _NBLOCKS[kind]
    start = r.pos
    payload = r.reals(nb * n * m * m, "block payload")
    bands = list(payload.reshape(n, nb, m, m).transpose(1, 0, 2, 3))
    if kind in ("tri", "penta"):
        for band, k in _corner_positions(kind, n):
            if np.any(bands[band][k] != 0.0):
                token = start + 1 + (k * nb + band) * m * m
                raise FormatError(f"kind {kind} has no corner block {'ABCDE'[band]}_{k + 1}", token)
    doc = CbxDocument(operator_from_bands(kind, bands))
    while r.more():
        tag = r.next("section tag")
        if tag == "RHS" and doc.rhs is None:
            doc.rhs = r.reals(n * m, "RHS").reshape(n, m)
        elif tag == "SOL" and doc.solution is None:
            doc.solution = r.reals(n * m, "SOL").reshape(n, m)
        else:
            raise FormatError(f"unexpected token {tag!r}", r.pos)
    return doc


def read_cbx(path):
    with open(path, "r", encoding="ascii") as fh:
        return parse_cbx(fh.read())


def save_cbx(path, op, rhs=None, solution=None):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(write_cbx(op, rhs, solution))


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n: int
    m: int
    seed: int = 0
    dominance: float = 1.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.m < 1:
            raise DimensionError(f"m must be >= 1, got {self.m}")
        if self.n < MIN_N[self.kind]:
            raise DimensionError(f"kind {self.kind} needs n >= {MIN_N[self.kind]}, got {self.n}")
        if not self.dominance >= 0:
            raise ValueError(f"dominance must be >= 0, got {self.dominance}")


def generate(spec):
    """Random operator and right-hand side for ``spec``.

    Off-diagonal entries are uniform on [-1, 1] and the raw diagonal of each
    ``B_k`` uniform on [0, 1]. Each diagonal entry then gets
    ``dominance * rowsum`` added, where ``rowsum`` is the absolute sum of the
    raw dense row, so ``dominance >= 1`` gives a strictly row diagonally
    dominant system. The RHS is uniform on [-1, 1].
    """
    n, m, kind = spec.n, spec.m, spec.kind
    rng = np.random.default_rng(spec.seed)
    nb = _NBLOCKS[kind]
    bands = [rng.uniform(-1.0, 1.0, size=(n, m, m)) for _ in range(nb)]
    idx = np.arange(m)
    bands[1][:, idx, idx] = rng.uniform(0.0, 1.0, size=(n, m))
    if kind in ("tri", "penta"):
        for band, k in _corner_positions(kind, n):
            bands[band][k] = 0.0
    rowsum = sum(np.abs(b).sum(axis=2) for b in bands)
    bands[1][:, idx, idx] += spec.dominance * rowsum
    rhs = rng.uniform(-1.0, 1.0, size=(n, m))
    return operator_from_bands(kind, bands), rhs
