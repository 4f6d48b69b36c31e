"""Singular irreducible M-matrices with zero column sums (``e^T A = 0``).

The homogeneous system ``A x = 0`` is attacked with "primed" splittings: the
leading ``(n-1) x (n-1)`` block of ``A`` is a nonsingular M-matrix, any
splitting of it is lifted back to ``A`` through the transform
``L = [[I, 0], [e^T, 1]]``, and convergence is measured by ``gamma(P)``, the
largest eigenvalue modulus other than 1.

Column sums are checked everywhere; a matrix with zero *row* sums (the usual
``pi Q = 0`` generator orientation) is rejected rather than transposed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from hessplit.iterate import IterationHistory, solve_stationary
from hessplit.matcore import BlockPartition, as_square, is_irreducible, is_z_matrix
from hessplit.splitlib import SOR_KINDS, Splitting, SubstitutionOrder, splitting, validate_regular


class GeneratorFormError(ValueError):
    pass


def _colsum_tol(A, tol):
    return tol * max(1.0, float(np.max(np.abs(A), initial=0.0))) * A.shape[0]


def column_sums_vanish(A, tol: float = 1e-12) -> bool:
    A = np.asarray(A, dtype=float)
    return bool(np.max(np.abs(A.sum(axis=0)), initial=0.0) <= _colsum_tol(A, tol))


def normalize_to_generator(A, tol: float = 1e-12) -> np.ndarray:
    """Scale ``A`` so that its largest diagonal entry is 1/2.

    ``T = I - A`` is then column stochastic with every diagonal entry at
    least 1/2 (a lazy, hence aperiodic, chain).  The kernel of ``A`` and the
    iteration matrices of its splittings do not depend on the scaling.

    Raises
    ------
    GeneratorFormError
        If the diagonal is not positive, ``A`` is not a Z-matrix, or the
        column sums do not vanish.
    """
    A = as_square(A)
    d = np.diag(A)
    if np.any(d <= 0):
        raise GeneratorFormError("not a generator-form matrix: diagonal must be positive")
    if not is_z_matrix(A, tol):
        raise GeneratorFormError("not a generator-form matrix: positive off-diagonal entries")
    B = A / (2.0 * d.max())
    if not column_sums_vanish(B, tol):
        hint = " (row sums vanish; pass the transpose)" if column_sums_vanish(B.T, tol) else ""
        raise GeneratorFormError("not a generator-form matrix: column sums are not zero" + hint)
    return B


@dataclass(frozen=True)
class LTransform:
    L: np.ndarray
    L_inverse: np.ndarray
    B: np.ndarray
    A_trunc: np.ndarray


def l_transform(A, tol: float = 1e-12) -> LTransform:
    """``B = L A`` with ``L = [[I, 0], [e^T, 1]]``; ``B``'s last row is set to exact zeros."""
    A = as_square(A)
    if not column_sums_vanish(A, tol):
        raise GeneratorFormError("e^T A != 0: column sums of A do not vanish")
    n = A.shape[0]
    L = np.eye(n)
    L[-1, :-1] = 1.0
    Linv = np.eye(n)
    Linv[-1, :-1] = -1.0
    B = L @ A
    B[-1, :] = 0.0
    return LTransform(L=L, L_inverse=Linv, B=B, A_trunc=A[:-1, :-1].copy())


def lift(X) -> np.ndarray:
    """``L^{-1} [[X, 0], [0, 1]]`` written out: last row is ``-e^T X`` then 1."""
    m = X.shape[0]
    M = np.zeros((m + 1, m + 1))
    M[:m, :m] = X
    M[m, :m] = -X.sum(axis=0)
    M[m, m] = 1.0
    return M


def primed_splitting(A, kind: str, partition: Optional[BlockPartition] = None,
                     omega: Optional[float] = None, tol: float = 1e-12) -> Splitting:
    """Lift a splitting of the leading block of ``A`` to a splitting of ``A``.

    ``kind`` is one of ``jacobi``, ``gs``, ``ags``, ``stair1``, ``stair2`` or an
    SOR kind (with ``omega``).  With a ``partition`` of ``A`` the leading block
    uses the same partition minus the last scalar index.  The returned
    splitting carries the partition of the solve units (leading blocks plus a
    trailing singleton) and the matching substitution order.

    The last row of ``N'`` is ``-e^T`` times the leading block of ``N``, so the
    lifted pair is usually not a regular splitting itself and ``regular`` is
    then false.  The comparison theory rests on the leading-block splitting,
    whose regularity is ``base_regular``.
    """
    A = as_square(A)
    lt = l_transform(A, tol)
    n = A.shape[0]
    sub_part = partition.truncated() if partition is not None else None
    if partition is not None and partition.total != n:
        raise ValueError(f"partition mismatch: sizes sum to {partition.total}, matrix has dimension {n}")
    if kind in SOR_KINDS and omega is None:
        raise ValueError(f"{kind} needs omega")
    base = splitting(lt.A_trunc, kind, sub_part, omega=omega)
    M = lift(base.M)
    m_units = base.order.perm if base.order is not None else None
    if sub_part is None:
        unit_part = None
        n_units = n - 1
    else:
        unit_part = BlockPartition(sub_part.sizes + (1,))
        n_units = sub_part.n_blocks
    order = None
    if m_units is not None:
        order = SubstitutionOrder(list(m_units) + [n_units])
    s = Splitting(A=A, M=M, N=M - A, kind=kind, order=order, omega=base.omega,
                  partition=unit_part, stair=base.stair, primed=True)
    s.regular = bool(validate_regular(s))
    s.base_regular = base.regular
    return s


def steady_state(A, kind: str = "gs", tol: float = 1e-10, max_sweeps: int = 100_000,
                 partition: Optional[BlockPartition] = None, return_history: bool = False):
    """Kernel vector of ``A`` (nonnegative, unit sum) by the primed stationary iteration.

    Starts from the uniform vector with ``b = 0`` and renormalizes to unit sum
    after every sweep; stops once ``||A x||_inf <= tol``.
    """
    s = primed_splitting(A, kind, partition)
    n = s.n
    hist: IterationHistory = solve_stationary(s, np.zeros(n), x0=np.full(n, 1.0 / n), tol=tol,
                                              max_sweeps=max_sweeps, normalize=True)
    if return_history:
        return hist.final_x, hist
    return hist.final_x


def random_singular_hessenberg(n: int, seed: int, max_tries: int = 100) -> np.ndarray:
    """``A = I - T`` with ``T`` column stochastic, lower Hessenberg and irreducible.

    Entries of ``T`` on the lower Hessenberg pattern are uniform on ``(0, 1]``
    (PCG64 stream seeded with ``seed``); columns are rescaled to sum 1 and
    draws that are not irreducible are rejected.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        T = np.tril(1.0 - rng.random((n, n)), 1)
        T /= T.sum(axis=0)
        A = np.eye(n) - T
        if is_irreducible(A):
            return A
    raise RuntimeError(f"no irreducible sample after {max_tries} draws")
