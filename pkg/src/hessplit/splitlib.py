"""Matrix splittings ``A = M - N``: Jacobi, Gauss-Seidel, anti-Gauss-Seidel,
stair (orders 1 and 2), substitution-order splittings and four SOR variants.

Every constructor accepts an optional :class:`~hessplit.matcore.BlockPartition`;
with it, patterns and substitution orders act on block indices.

Indices are 0-based throughout.  "Odd rows" in the stair construction refer
to the conventional 1-based numbering, i.e. 0-based rows 0, 2, 4, ...
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from hessplit.matcore import (
    BlockPartition,
    as_square,
    certify_m_matrix,
    index_labels,
    part_extract,
)

KINDS = ("jacobi", "gs", "ags", "stair1", "stair2", "substitution",
         "gsor", "agsor", "stsor", "stsor2", "custom")
SOR_KINDS = ("gsor", "agsor", "stsor", "stsor2")


@dataclass(frozen=True)
class SubstitutionOrder:
    """A permutation ``perm`` of ``0..n-1`` (scalar or block indices).

    ``M`` admits the order when ``M[i, j] == 0`` whenever ``j`` comes after
    ``i`` in ``perm``; systems with ``M`` then solve by substitution along
    ``perm``.
    """

    perm: tuple

    def __init__(self, perm: Sequence[int]):
        perm = tuple(int(p) for p in perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"substitution order is not a permutation of 0..{len(perm) - 1}: {perm}")
        object.__setattr__(self, "perm", perm)

    def __len__(self):
        return len(self.perm)

    def __iter__(self):
        return iter(self.perm)

    def positions(self) -> np.ndarray:
        """``pos[i]`` is the place of index ``i`` in the order."""
        pos = np.empty(len(self.perm), dtype=int)
        pos[list(self.perm)] = np.arange(len(self.perm))
        return pos

    def permutation_matrix(self) -> np.ndarray:
        """``Pi`` with ``Pi @ M @ Pi.T`` lower triangular for an admissible ``M``."""
        n = len(self.perm)
        Pi = np.zeros((n, n))
        Pi[np.arange(n), list(self.perm)] = 1.0
        return Pi


def _as_order(order) -> SubstitutionOrder:
    return order if isinstance(order, SubstitutionOrder) else SubstitutionOrder(order)


@dataclass
class Splitting:
    A: np.ndarray
    M: np.ndarray
    N: np.ndarray
    kind: str
    order: Optional[SubstitutionOrder] = None
    omega: Optional[float] = None
    partition: Optional[BlockPartition] = None
    stair: Optional[int] = None
    regular: bool = field(default=False)
    primed: bool = False
    base_regular: Optional[bool] = None

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def labels(self) -> np.ndarray:
        return index_labels(self.n, self.partition)


class Regularity(NamedTuple):
    ok: bool
    message: str
    location: Optional[tuple] = None

    def __bool__(self):
        return self.ok


def _first_violation(mask):
    idx = np.argwhere(mask)
    return tuple(int(t) for t in idx[0]) if len(idx) else None


def validate_regular(s: Splitting, tol: float = 1e-12) -> Regularity:
    """Check ``N >= 0``, ``M`` a certified M-matrix and ``M - N = A`` (elementwise ``tol``)."""
    scale = max(1.0, float(np.max(np.abs(s.A), initial=0.0)))
    where = _first_violation(np.abs(s.M - s.N - s.A) > tol * scale)
    if where is not None:
        return Regularity(False, f"M - N != A at {where}", where)
    where = _first_violation(s.N < -tol * scale)
    if where is not None:
        return Regularity(False, f"N has negative entry {s.N[where]:.3g} at {where}", where)
    off = ~np.eye(s.n, dtype=bool)
    where = _first_violation(off & (s.M > tol * scale))
    if where is not None:
        return Regularity(False, f"M is not a Z-matrix: positive off-diagonal at {where}", where)
    if certify_m_matrix(s.M, tol=tol * scale) is None:
        return Regularity(False, "no M-matrix certificate found for M")
    return Regularity(True, "regular")


def _check_diagonal_blocks(M, partition):
    labels = index_labels(M.shape[0], partition)
    if partition is None:
        if np.any(np.diag(M) == 0):
            raise ValueError("diagonal not invertible")
        return
    for k in range(partition.n_blocks):
        sl = labels == k
        blk = M[np.ix_(sl, sl)]
        if np.linalg.cond(blk) > 1.0 / np.finfo(float).eps:
            raise ValueError("diagonal not invertible")


def _make(A, M, kind, order=None, omega=None, partition=None, stair=None, check_diag=True):
    if check_diag:
        _check_diagonal_blocks(M, partition)
    s = Splitting(A=A, M=M, N=M - A, kind=kind, order=order, omega=omega,
                  partition=partition, stair=stair)
    s.regular = bool(validate_regular(s))
    return s


def identity_order(m: int) -> SubstitutionOrder:
    return SubstitutionOrder(range(m))


def reverse_order(m: int) -> SubstitutionOrder:
    return SubstitutionOrder(range(m - 1, -1, -1))


def stair_order(m: int, kind: int) -> SubstitutionOrder:
    """Diagonal-only (block) rows first, then the coupled ones."""
    first = list(range(0, m, 2)) if kind == 1 else list(range(1, m, 2))
    second = list(range(1, m, 2)) if kind == 1 else list(range(0, m, 2))
    return SubstitutionOrder(first + second)


def _n_units(A, partition):
    return A.shape[0] if partition is None else partition.n_blocks


def classic_splitting(A, kind: str, partition: Optional[BlockPartition] = None) -> Splitting:
    """Jacobi (``M = diag A``), Gauss-Seidel (``tril``) or anti-Gauss-Seidel (``triu``)."""
    A = as_square(A)
    m = len(set(index_labels(A.shape[0], partition)))
    if kind == "jacobi":
        M, order = part_extract(A, "diag", partition), identity_order(m)
    elif kind == "gs":
        M, order = part_extract(A, "tril", partition), identity_order(m)
    elif kind == "ags":
        M, order = part_extract(A, "triu", partition), reverse_order(m)
    else:
        raise ValueError(f"unknown classic splitting {kind!r}")
    return _make(A, M, kind, order=order, partition=partition)


def _check_stair_kind(kind):
    if kind not in (1, 2):
        raise ValueError(f"stair order must be 1 or 2, got {kind!r}")


def stair_matrix(A, kind: int = 1, partition: Optional[BlockPartition] = None) -> np.ndarray:
    """Stair matrix of order ``kind`` built from the (block) tridiagonal part of ``A``.

    Order 1 keeps only the diagonal (block) in the odd (block) rows 1, 3, 5, ...
    (1-based); order 2 does the same in the even rows.  Out-of-range neighbours
    at the first and last row are simply absent.
    """
    _check_stair_kind(kind)
    A = as_square(A)
    lab = index_labels(A.shape[0], partition)
    bi, bj = lab[:, None], lab[None, :]
    S = part_extract(A, "tridiag", partition)
    diag_only_rows = (lab % 2 == 0) if kind == 1 else (lab % 2 == 1)
    S[diag_only_rows[:, None] & (bi != bj)] = 0.0
    return S


def stair_splitting(A, kind: int = 1, partition: Optional[BlockPartition] = None) -> Splitting:
    _check_stair_kind(kind)
    A = as_square(A)
    M = stair_matrix(A, kind, partition)
    return _make(A, M, f"stair{kind}", order=stair_order(_n_units(A, partition), kind),
                 partition=partition, stair=kind)


def substitution_splitting(A, order, partition: Optional[BlockPartition] = None) -> Splitting:
    """The maximal-``M`` splitting admitting ``order``.

    ``M[i, j] = A[i, j]`` unless ``j`` comes after ``i`` in ``order``, in which
    case it is zero; ``N = M - A``.
    """
    A = as_square(A)
    order = _as_order(order)
    lab = index_labels(A.shape[0], partition)
    if len(order) != _n_units(A, partition):
        raise ValueError(f"order has length {len(order)}, expected {_n_units(A, partition)}")
    pos = order.positions()[lab]
    M = np.where(pos[None, :] > pos[:, None], 0.0, A)
    return _make(A, M, "substitution", order=order, partition=partition)


def substitution_levels(M, partition: Optional[BlockPartition] = None, tol: float = 0.0):
    """Group (block) indices into successive levels of a substitution order.

    Level 0 holds the rows coupled to nothing else; level ``k`` holds rows whose
    off-diagonal nonzeros lie in levels ``< k``.  Rows within one level are
    independent of each other.  Returns ``None`` when ``M`` admits no order.
    """
    M = as_square(M, "M")
    lab = index_labels(M.shape[0], partition)
    m = int(lab.max()) + 1 if len(lab) else 0
    nz = np.abs(M) > tol
    # deps[I, J]: block row I reads block column J (J != I)
    deps = np.zeros((m, m), dtype=bool)
    rows, cols = np.nonzero(nz)
    deps[lab[rows], lab[cols]] = True
    np.fill_diagonal(deps, False)

    done = np.zeros(m, dtype=bool)
    levels = []
    while not done.all():
        ready = ~done & ~np.any(deps & ~done[None, :], axis=1)
        if not ready.any():
            return None
        levels.append([int(i) for i in np.flatnonzero(ready)])
        done |= ready
    return levels


def find_substitution_order(M, partition: Optional[BlockPartition] = None,
                            tol: float = 0.0) -> Optional[SubstitutionOrder]:
    """A permutation making ``Pi M Pi^T`` (block) lower triangular, or ``None``."""
    levels = substitution_levels(M, partition, tol)
    if levels is None:
        return None
    return SubstitutionOrder([i for lvl in levels for i in lvl])


def sor_splitting(A, kind: str, omega: float, partition: Optional[BlockPartition] = None,
                  stair: int = 1) -> Splitting:
    """Over-relaxed Gauss-Seidel, anti-Gauss-Seidel and staircase splittings.

    ======== ==================================
    gsor     ``M = D / omega + L``
    agsor    ``M = D / omega + U``
    stsor    ``M = M_S + (1 - omega) / omega * D``
    stsor2   ``M = omega * M_S + (1 - omega) * D``
    ======== ==================================

    ``D``, ``L``, ``U`` are the (block) diagonal, strictly lower and strictly
    upper parts of ``A`` and ``M_S`` is the stair matrix of order ``stair``.
    For ``omega > 1`` the result is generally not a regular splitting; it is
    still returned, with ``regular=False``.
    """
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    A = as_square(A)
    m = _n_units(A, partition)
    D = part_extract(A, "diag", partition)
    if kind == "gsor":
        M, order = D / omega + part_extract(A, "strict_tril", partition), identity_order(m)
    elif kind == "agsor":
        M, order = D / omega + part_extract(A, "strict_triu", partition), reverse_order(m)
    elif kind in ("stsor", "stsor2"):
        _check_stair_kind(stair)
        S = stair_matrix(A, stair, partition)
        if kind == "stsor":
            M = S + (1.0 - omega) / omega * D
        else:
            M = omega * S + (1.0 - omega) * D
        order = stair_order(m, stair)
    else:
        raise ValueError(f"unknown SOR kind {kind!r}; expected one of {SOR_KINDS}")
    return _make(A, M, kind, order=order, omega=float(omega), partition=partition,
                 stair=stair if kind in ("stsor", "stsor2") else None)


def custom_splitting(A, M, partition: Optional[BlockPartition] = None) -> Splitting:
    """Wrap an arbitrary ``M``; a substitution order is attached when one exists."""
    A = as_square(A)
    M = as_square(M, "M")
    if M.shape != A.shape:
        raise ValueError("M and A differ in shape")
    return _make(A, M.copy(), "custom", order=find_substitution_order(M, partition),
                 partition=partition, check_diag=False)


def splitting(A, kind: str, partition: Optional[BlockPartition] = None,
              omega: Optional[float] = None) -> Splitting:
    """Dispatch on a kind tag (``jacobi``, ``gs``, ``ags``, ``stair1``, ``stair2``, SOR kinds)."""
    if kind in ("jacobi", "gs", "ags"):
        return classic_splitting(A, kind, partition)
    if kind in ("stair1", "stair2"):
        return stair_splitting(A, int(kind[-1]), partition)
    if kind in SOR_KINDS:
        return sor_splitting(A, kind, 1.0 if omega is None else omega, partition)
    raise ValueError(f"unknown splitting kind {kind!r}")
