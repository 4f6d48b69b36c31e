"""Stationary iterations ``x <- M^{-1}(N x + b)`` for a :class:`~hessplit.splitlib.Splitting`.

Solves with ``M`` go by substitution whenever the splitting carries a
substitution order, and through an LU factorization otherwise.  The iteration
matrix ``P = M^{-1} N`` is only formed for spectral analysis.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.linalg

from hessplit.splitlib import SOR_KINDS, Splitting, substitution_levels

log = logging.getLogger(__name__)


class SingularSplittingError(np.linalg.LinAlgError):
    pass


@dataclass
class IterationHistory:
    residual_norms: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    diverged: bool = False
    final_x: Optional[np.ndarray] = None


class _Plan:
    """Per-splitting index bookkeeping shared by every sweep variant."""

    def __init__(self, s: Splitting):
        self.s = s
        labels = s.labels()
        m = int(labels.max()) + 1
        self.units = [np.flatnonzero(labels == k) for k in range(m)]
        self.scalar = s.partition is None
        self._lu = {}
        # off-diagonal (block) columns read by each (block) row of M
        nzM = s.M != 0
        self.reads = []
        for k, idx in enumerate(self.units):
            row = np.any(nzM[idx], axis=0)
            row[idx] = False
            self.reads.append(np.flatnonzero(row))

    def solve_diag(self, M, k, rhs):
        idx = self.units[k]
        if self.scalar:
            d = M[idx[0], idx[0]]
            if d == 0:
                raise SingularSplittingError("M singular")
            return rhs / d
        key = (id(M), k)
        if key not in self._lu:
            blk = M[np.ix_(idx, idx)]
            if np.linalg.cond(blk) > 1.0 / np.finfo(float).eps:
                raise SingularSplittingError("M singular")
            self._lu[key] = scipy.linalg.lu_factor(blk)
        return scipy.linalg.lu_solve(self._lu[key], rhs)


def _plan(s: Splitting) -> _Plan:
    plan = s.__dict__.get("_plan")
    if plan is None or plan.s is not s:
        plan = _Plan(s)
        s.__dict__["_plan"] = plan
    return plan


def _update_unit(plan: _Plan, k: int, rhs, xnew):
    """Solve (block) row ``k`` of ``M x = rhs`` given the already known entries of ``xnew``.

    Both the sequential sweep and the two-phase staircase sweep call this, so
    a component is computed with the same arithmetic whichever path runs.
    """
    M = plan.s.M
    idx = plan.units[k]
    cols = plan.reads[k]
    val = rhs[idx]
    if len(cols):
        val = val - M[np.ix_(idx, cols)] @ xnew[cols]
    xnew[idx] = plan.solve_diag(M, k, val)


def _substitution_solve(plan: _Plan, rhs):
    x = np.zeros_like(rhs, dtype=float)
    for k in plan.s.order:
        _update_unit(plan, k, rhs, x)
    return x


def _lu(s: Splitting):
    lu = s.__dict__.get("_lu")
    if lu is None:
        with np.errstate(all="ignore"), warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu = scipy.linalg.lu_factor(s.M, check_finite=True)
        piv = np.abs(np.diag(lu[0]))
        if not np.all(np.isfinite(lu[0])) or piv.min() <= np.finfo(float).eps * max(piv.max(), 1.0) * s.n:
            raise SingularSplittingError("M singular")
        s.__dict__["_lu"] = lu
    return lu


def solve_M(s: Splitting, rhs) -> np.ndarray:
    """``M^{-1} rhs`` (vector or matrix right-hand side)."""
    rhs = np.asarray(rhs, dtype=float)
    if s.order is not None:
        return _substitution_solve(_plan(s), rhs)
    return scipy.linalg.lu_solve(_lu(s), rhs)


def iteration_matrix(s: Splitting) -> np.ndarray:
    """``P = M^{-1} N``."""
    return solve_M(s, s.N)


def _sor_sweep(s: Splitting, x, b):
    # Componentwise relaxation formulas; "fresh" neighbours are those kept in
    # the base (omega = 1) M, visited in the splitting's substitution order.
    plan = _plan(s)
    A, w = s.A, s.omega
    labels = s.labels()
    xnew = x.copy()
    for k in s.order:
        idx = plan.units[k]
        fresh = plan.reads[k]
        stale = np.flatnonzero((labels != k) & ~np.isin(np.arange(s.n), fresh))
        Ast = A[np.ix_(idx, stale)] @ x[stale] if len(stale) else 0.0
        if s.kind == "stsor2":
            mixed = (1.0 - w) * x[fresh] + w * xnew[fresh]
            t = b[idx] - (A[np.ix_(idx, fresh)] @ mixed if len(fresh) else 0.0) - Ast
            xnew[idx] = plan.solve_diag(A, k, t)
        else:
            t = b[idx] - (A[np.ix_(idx, fresh)] @ xnew[fresh] if len(fresh) else 0.0) - Ast
            xnew[idx] = (1.0 - w) * x[idx] + w * plan.solve_diag(A, k, t)
    return xnew


def sweep(s: Splitting, x, b) -> np.ndarray:
    """One step of the stationary iteration: ``x'`` solving ``M x' = N x + b``.

    SOR kinds use the componentwise relaxation updates directly; other
    splittings with a substitution order solve row by row along the order.
    """
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float)
    if x.shape != (s.n,) or b.shape != (s.n,):
        raise ValueError(f"x and b must have shape ({s.n},)")
    if s.kind in SOR_KINDS and not s.primed:
        return _sor_sweep(s, x, b)
    rhs = s.N @ x + b
    if s.order is not None:
        return _substitution_solve(_plan(s), rhs)
    return scipy.linalg.lu_solve(_lu(s), rhs)


def staircase_phases(s: Splitting):
    levels = s.__dict__.get("_phases")
    if levels is None:
        levels = substitution_levels(s.M, s.partition)
        s.__dict__["_phases"] = levels
    return levels


def staircase_sweep_two_phase(s: Splitting, x, b, executor=None) -> np.ndarray:
    """Stair sweep as two rounds of mutually independent (block) row solves.

    Phase 1 solves the diagonal-only rows, phase 2 the rows coupled to them.
    A primed splitting (singular systems) adds a last sequential step for its
    pinned final row, which reads every other component.  With an ``executor`` (e.g. ``concurrent.futures.ThreadPoolExecutor``) the
    rows of each phase are dispatched concurrently; phase 2 starts only after
    every phase-1 row is written.  Results equal :func:`sweep` exactly.
    """
    levels = staircase_phases(s) if s.kind in ("stair1", "stair2", "substitution", "custom") else None
    pinned_tail = (s.primed and levels is not None and len(levels) == 3
                   and levels[-1] == [len(_plan(s).units) - 1])
    if levels is None or (len(levels) > 2 and not pinned_tail):
        raise ValueError(f"two-phase sweep needs a stair splitting, got kind {s.kind!r}")
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float)
    plan = _plan(s)
    rhs = s.N @ x + b
    xnew = np.zeros(s.n)
    for phase in levels:
        if executor is None:
            for k in phase:
                _update_unit(plan, k, rhs, xnew)
        else:
            list(executor.map(lambda k: _update_unit(plan, k, rhs, xnew), phase))
    return xnew


def residual_norm(A, x, b) -> float:
    return float(np.max(np.abs(b - A @ x), initial=0.0))


def solve_stationary(s: Splitting, b, x0=None, tol: float = 1e-10, max_sweeps: int = 10_000,
                     normalize: bool = False) -> IterationHistory:
    """Iterate until ``||b - A x||_inf <= tol * (1 + ||b||_inf)`` or ``max_sweeps``.

    ``normalize`` rescales ``x`` to unit sum after every sweep (used for
    homogeneous singular systems).  Divergence (residual beyond ``1e12`` times
    the initial one, or non-finite) stops the loop and is flagged in the
    history instead of raising.
    """
    b = np.asarray(b, dtype=float)
    x = np.zeros(s.n) if x0 is None else np.array(x0, dtype=float)
    if normalize:
        x = x / x.sum()
    target = tol * (1.0 + float(np.max(np.abs(b), initial=0.0)))
    hist = IterationHistory()
    r0 = residual_norm(s.A, x, b)
    hist.residual_norms.append(r0)
    for it in range(max_sweeps):
        if hist.residual_norms[-1] <= target:
            hist.converged = True
            break
        x = sweep(s, x, b)
        if normalize:
            total = x.sum()
            if total != 0 and np.isfinite(total):
                x = x / total
        r = residual_norm(s.A, x, b)
        hist.residual_norms.append(r)
        hist.iterations = it + 1
        if not np.isfinite(r) or (r0 > 0 and r > 1e12 * r0):
            hist.diverged = True
            log.warning("%s iteration diverged after %d sweeps (residual %.3g)", s.kind, it + 1, r)
            break
    else:
        hist.converged = hist.residual_norms[-1] <= target
    hist.final_x = x
    return hist
