"""Matrix Market (coordinate and array, real/integer) reader and writer for dense matrices.

Also reads and writes the block-partition sidecar: plain text, one positive
block size per line.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np

from hessplit.matcore import BlockPartition


class MatrixMarketError(ValueError):
    def __init__(self, path, lineno, msg):
        self.path = str(path)
        self.lineno = lineno
        where = f"{path}:{lineno}" if lineno else str(path)
        super().__init__(f"{where}: {msg}")


_FIELDS = ("real", "integer", "double")
_SYMMETRIES = ("general", "symmetric", "skew-symmetric")


def read_matrix_market(path) -> np.ndarray:
    """Read a Matrix Market file into a dense float array."""
    path = os.fspath(path)
    with open(path, "r") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixMarketError(path, 1, "empty file")

    header = lines[0].strip().split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket" or header[1].lower() != "matrix":
        raise MatrixMarketError(path, 1, f"bad banner {lines[0]!r}")
    fmt, field, symmetry = (h.lower() for h in header[2:])
    if fmt not in ("coordinate", "array"):
        raise MatrixMarketError(path, 1, f"unsupported format {fmt!r}")
    if field not in _FIELDS:
        raise MatrixMarketError(path, 1, f"unsupported field {field!r} (complex/pattern not supported)")
    if symmetry not in _SYMMETRIES:
        raise MatrixMarketError(path, 1, f"unsupported symmetry {symmetry!r}")

    body = [(i + 1, ln) for i, ln in enumerate(lines) if i > 0 and ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise MatrixMarketError(path, len(lines), "missing size line")

    lineno, size_line = body[0]
    try:
        dims = [int(t) for t in size_line.split()]
    except ValueError:
        raise MatrixMarketError(path, lineno, f"bad size line {size_line!r}") from None
    entries = body[1:]

    if fmt == "coordinate":
        if len(dims) != 3:
            raise MatrixMarketError(path, lineno, "coordinate size line needs rows cols nnz")
        m, n, nnz = dims
        if len(entries) != nnz:
            raise MatrixMarketError(path, lineno, f"expected {nnz} entries, found {len(entries)}")
        A = np.zeros((m, n))
        for lineno, ln in entries:
            tok = ln.split()
            if len(tok) != 3:
                raise MatrixMarketError(path, lineno, f"expected 'i j value', got {ln!r}")
            try:
                i, j, val = int(tok[0]), int(tok[1]), float(tok[2])
            except ValueError:
                raise MatrixMarketError(path, lineno, f"cannot parse entry {ln!r}") from None
            if not (1 <= i <= m and 1 <= j <= n):
                raise MatrixMarketError(path, lineno, f"index ({i}, {j}) out of range")
            A[i - 1, j - 1] += val
            if symmetry != "general" and i != j:
                A[j - 1, i - 1] += val if symmetry == "symmetric" else -val
    else:
        if len(dims) != 2:
            raise MatrixMarketError(path, lineno, "array size line needs rows cols")
        m, n = dims
        if symmetry == "general":
            cells = [(i, j) for j in range(n) for i in range(m)]
        else:
            lo = 0 if symmetry == "symmetric" else 1
            cells = [(i, j) for j in range(n) for i in range(j + lo, m)]
        if len(entries) != len(cells):
            raise MatrixMarketError(path, lineno, f"expected {len(cells)} values, found {len(entries)}")
        A = np.zeros((m, n))
        for (i, j), (lineno, ln) in zip(cells, entries):
            try:
                val = float(ln.strip())
            except ValueError:
                raise MatrixMarketError(path, lineno, f"cannot parse value {ln!r}") from None
            A[i, j] = val
            if symmetry != "general" and i != j:
                A[j, i] = val if symmetry == "symmetric" else -val

    if not np.all(np.isfinite(A)):
        raise MatrixMarketError(path, 0, "non-finite entries")
    return A


def write_matrix_market(path, A, fmt: str = "coordinate", comment: Optional[str] = None) -> None:
    """Write a dense matrix; ``repr``-exact floats so a round trip is lossless."""
    A = np.asarray(A, dtype=float)
    if fmt not in ("coordinate", "array"):
        raise ValueError(f"unknown Matrix Market format {fmt!r}")
    m, n = A.shape
    out = [f"%%MatrixMarket matrix {fmt} real general"]
    if comment:
        out.extend("% " + c for c in comment.splitlines())
    if fmt == "coordinate":
        rows, cols = np.nonzero(A.T)
        out.append(f"{m} {n} {len(rows)}")
        # column-major order, like most Matrix Market writers
        out.extend(f"{i + 1} {j + 1} {float(A[i, j])!r}" for j, i in zip(rows, cols))
    else:
        out.append(f"{m} {n}")
        out.extend(repr(float(x)) for x in A.T.ravel())
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def read_partition(path, dimension: Optional[int] = None) -> BlockPartition:
    sizes = []
    with open(path) as fh:
        for lineno, ln in enumerate(fh, start=1):
            s = ln.strip()
            if not s or s.startswith("#"):
                continue
            try:
                k = int(s)
            except ValueError:
                raise MatrixMarketError(path, lineno, f"block size {s!r} is not an integer") from None
            if k <= 0:
                raise MatrixMarketError(path, lineno, f"block size must be positive, got {k}")
            sizes.append(k)
    if not sizes:
        raise MatrixMarketError(path, 0, "partition file has no block sizes")
    part = BlockPartition(sizes)
    if dimension is not None and part.total != dimension:
        raise MatrixMarketError(path, 0, f"partition mismatch: sizes sum to {part.total}, matrix has dimension {dimension}")
    return part


def write_partition(path, partition: BlockPartition) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("".join(f"{s}\n" for s in partition.sizes))
