"""Dense matrix helpers: part extraction, structural predicates, M-matrix certificates.

Matrices are plain 2-D ``numpy.ndarray`` objects of dtype float64.  Block
variants of every construction are obtained by mapping each scalar index to
its block index through a :class:`BlockPartition`, so the same pattern logic
serves both granularities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

PARTS = ("diag", "tril", "triu", "strict_tril", "strict_triu", "tridiag")


@dataclass(frozen=True)
class BlockPartition:
    """Ordered block sizes ``(n_1, ..., n_m)`` of a square matrix."""

    sizes: tuple

    def __init__(self, sizes: Sequence[int]):
        sizes = tuple(int(s) for s in sizes)
        if not sizes or any(s <= 0 for s in sizes):
            raise ValueError(f"block sizes must be positive integers, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def uniform(cls, n_blocks: int, size: int) -> "BlockPartition":
        return cls([size] * n_blocks)

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @property
    def n_blocks(self) -> int:
        return len(self.sizes)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.sizes)])

    def block_slice(self, k: int) -> slice:
        off = self.offsets
        return slice(int(off[k]), int(off[k + 1]))

    def labels(self) -> np.ndarray:
        """Block index of every scalar index."""
        return np.repeat(np.arange(self.n_blocks), self.sizes)

    def truncated(self) -> "BlockPartition":
        """Partition of the leading ``total - 1`` indices (drops the last scalar index)."""
        sizes = list(self.sizes)
        sizes[-1] -= 1
        if sizes[-1] == 0:
            sizes.pop()
        return BlockPartition(sizes)


@dataclass(frozen=True)
class MMatrixCertificate:
    """Witness ``A u = v`` with ``u > 0``, ``v >= 0``, ``v != 0`` for a Z-matrix ``A``."""

    u: np.ndarray
    v: np.ndarray
    residual_norm: float


def as_square(A, name: str = "A") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def index_labels(n: int, partition: Optional[BlockPartition] = None) -> np.ndarray:
    """Per-index block labels; the identity labelling when no partition is given."""
    if partition is None:
        return np.arange(n)
    if partition.total != n:
        raise ValueError(f"partition mismatch: sizes sum to {partition.total}, matrix has dimension {n}")
    return partition.labels()


def _label_grid(n, partition):
    lab = index_labels(n, partition)
    return lab[:, None], lab[None, :]


def part_mask(n: int, part: str, partition: Optional[BlockPartition] = None) -> np.ndarray:
    """Boolean pattern selecting ``part`` of an ``n x n`` matrix."""
    bi, bj = _label_grid(n, partition)
    if part == "diag":
        return bi == bj
    if part == "tril":
        return bi >= bj
    if part == "triu":
        return bi <= bj
    if part == "strict_tril":
        return bi > bj
    if part == "strict_triu":
        return bi < bj
    if part == "tridiag":
        return np.abs(bi - bj) <= 1
    raise ValueError(f"unknown part {part!r}; expected one of {PARTS}")


def part_extract(A, part: str, partition: Optional[BlockPartition] = None) -> np.ndarray:
    """Copy of ``A`` restricted to ``part``; zeros elsewhere.

    With a ``partition`` the pattern is taken at block granularity, e.g.
    ``part="diag"`` gives the block diagonal.

    >>> part_extract([[2., -1.], [-1., 2.]], "tril")
    array([[ 2.,  0.],
           [-1.,  2.]])
    """
    A = as_square(A)
    return np.where(part_mask(A.shape[0], part, partition), A, 0.0)


def is_lower_hessenberg(A, partition: Optional[BlockPartition] = None, tol: float = 0.0) -> bool:
    A = as_square(A)
    bi, bj = _label_grid(A.shape[0], partition)
    return bool(np.all(np.abs(A[bj > bi + 1]) <= tol))


def is_z_matrix(A, tol: float = 0.0) -> bool:
    A = as_square(A)
    off = ~np.eye(A.shape[0], dtype=bool)
    return bool(np.all(A[off] <= tol))


def _perron_like_vector(A, steps=200):
    # Power steps on the nonnegative matrix sI - A (+I shift to damp periodicity).
    n = A.shape[0]
    s = float(np.max(np.diag(A))) if n else 0.0
    B = s * np.eye(n) - A
    B = np.maximum(B, 0.0) + np.eye(n)
    x = np.ones(n)
    for _ in range(steps):
        y = B @ x
        nrm = np.max(y)
        if nrm <= 0:
            break
        x = y / nrm
    return x


def _check_pair(A, u, v, tol):
    if u is None or not np.all(np.isfinite(u)) or not np.all(u > 0):
        return None
    if v is None:
        v = A @ u
    if np.all(v >= -tol) and np.any(v > tol):
        res = float(np.max(np.abs(A @ u - v))) if len(u) else 0.0
        return MMatrixCertificate(u=np.asarray(u, float), v=np.asarray(v, float), residual_norm=res)
    return None


def certify_m_matrix(A, u=None, tol: float = 0.0, v=None) -> Optional[MMatrixCertificate]:
    """Look for a vector ``u > 0`` with ``A u >= 0`` and ``A u != 0``.

    A Z-matrix admitting such a ``u`` is a nonsingular M-matrix.  If ``u`` is
    given only that vector is tried (and, with ``v`` also given, ``A u = v``
    is checked to within ``max(tol, 1e-12 * scale)``).  Otherwise the all-ones
    vector, a Perron-like vector of the nonnegative part, and ``A^{-1} 1`` are
    tried in turn.

    Returns ``None`` when no certificate was found; that does not prove ``A``
    is not an M-matrix.

    Raises
    ------
    ValueError
        If ``A`` is not a Z-matrix (off-diagonal entries above ``tol``).
    """
    A = as_square(A)
    if not is_z_matrix(A, tol):
        raise ValueError("not a Z-matrix")
    if u is not None:
        u = np.asarray(u, dtype=float)
        if v is not None:
            v = np.asarray(v, dtype=float)
            scale = max(1.0, float(np.max(np.abs(A)) * np.max(np.abs(u)))) if A.size else 1.0
            if np.max(np.abs(A @ u - v), initial=0.0) > max(tol, 1e-12 * scale * A.shape[0]):
                return None
        return _check_pair(A, u, v, tol)

    cert = _check_pair(A, np.ones(A.shape[0]), None, tol)
    if cert is None:
        cert = _check_pair(A, _perron_like_vector(A), None, tol)
    if cert is None:
        try:
            w = np.linalg.solve(A, np.ones(A.shape[0]))
        except np.linalg.LinAlgError:
            w = None
        cert = _check_pair(A, w, None, tol)
    return cert


def is_irreducible(A) -> bool:
    """True iff the off-diagonal nonzero pattern of ``A`` is strongly connected."""
    A = as_square(A)
    n = A.shape[0]
    if n == 1:
        return True
    adj = (A != 0) & ~np.eye(n, dtype=bool)
    ncomp, _ = connected_components(adj.astype(np.int8), directed=True, connection="strong")
    return ncomp == 1


def reversal(n: int) -> np.ndarray:
    """Index permutation reversing ``0..n-1``; relabels upper Hessenberg as lower."""
    return np.arange(n)[::-1]


def flip(A) -> np.ndarray:
    A = as_square(A)
    r = reversal(A.shape[0])
    return A[np.ix_(r, r)]
