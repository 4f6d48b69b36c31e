"""Eigenvalues, spectral radius, convergence factor and iterations-to-threshold."""

from __future__ import annotations

import logging
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from hessplit.iterate import iteration_matrix

log = logging.getLogger(__name__)


class EigenvalueError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    rho: float
    gamma: float
    one_eigenvalue_present: bool

    @property
    def k(self) -> float:
        """Sweeps needed for the governing factor to drop below 0.01."""
        return iterations_to_threshold(self.gamma)


def _checked(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def _qr_failed(A, exc):
    fd, dump = tempfile.mkstemp(prefix="qr_failed_", suffix=".npy")
    os.close(fd)
    np.save(dump, A)
    return EigenvalueError(f"QR failed ({exc}); matrix saved to {dump}")


def _eig_with_vectors(A):
    A = _checked(A)
    try:
        return np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise _qr_failed(A, exc) from exc


def eigenvalues(A) -> np.ndarray:
    """All eigenvalues of a real square matrix (LAPACK Hessenberg reduction + shifted QR).

    Raises
    ------
    EigenvalueError
        "QR failed" when the iteration does not converge.  The offending
        matrix is saved to a temporary ``.npy`` file named in the message.
    """
    A = _checked(A)
    try:
        return np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise _qr_failed(A, exc) from exc


def perron_bounds(B, maxiter: int = 2000, rtol: float = 1e-10, x0=None):
    """Collatz-Wielandt bracket ``lower <= rho(B) <= upper`` for ``B >= 0``.

    Runs power iteration on ``B + I`` (the shift removes periodic oscillation
    and keeps the iterate strictly positive) from ``x0`` (default all ones).
    The bounds hold for any positive start, so a good guess only speeds
    things up.  Returns ``(lower, upper, converged)``.
    """
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    if x0 is None:
        x = np.ones(n)
    else:
        x = np.abs(np.asarray(x0, dtype=float))
        x = x / x.max() + 1e-12
    lower, upper = 0.0, math.inf
    for _ in range(maxiter):
        Bx = B @ x
        upper = min(upper, float(np.max(Bx / x)))
        # lower bound from the thresholded (still nonnegative) vector
        xs = np.where(x > 1e-10 * x.max(), x, 0.0)
        Bxs = B @ xs
        sup = xs > 0
        lower = max(lower, float(np.min(Bxs[sup] / xs[sup])))
        if upper - lower <= rtol * max(upper, 1e-300):
            return lower, upper, True
        y = Bx + x
        x = y / y.max()
    return lower, upper, False


def spectral_radius(P, check: bool = True) -> float:
    """``max |lambda|`` over the eigenvalues of ``P``.

    For elementwise nonnegative ``P`` the result is cross-checked against the
    Perron root bracket from :func:`perron_bounds` (relative tolerance 1e-8).
    """
    P = np.asarray(P, dtype=float)
    if P.size == 0:
        return 0.0
    scale = float(np.max(np.abs(P)))
    if not (check and scale > 0 and P.min() >= -1e-12 * scale):
        return float(np.max(np.abs(eigenvalues(P))))
    ev, vecs = _eig_with_vectors(P)
    i = int(np.argmax(np.abs(ev)))
    rho = float(abs(ev[i]))
    # the bracket is rigorous for any positive start; the eigenvector only speeds it up
    lo, hi, converged = perron_bounds(np.abs(P), x0=vecs[:, i].real)
    slack = 1e-8 * max(rho, hi, 1e-300)
    if not (lo - slack <= rho <= hi + slack):
        raise RuntimeError(
            f"spectral radius cross-check failed: eig gives {rho!r}, Perron bracket [{lo!r}, {hi!r}]")
    if not converged:
        log.debug("Perron bracket not tight: [%g, %g] around %g", lo, hi, rho)
    return rho


def convergence_factor(P, tol_one: float = 1e-8) -> SpectrumReport:
    """Spectral radius and ``gamma = max |lambda|`` over eigenvalues other than 1.

    An eigenvalue counts as 1 when ``|lambda - 1| <= tol_one * ||P||_inf``.
    """
    P = np.asarray(P, dtype=float)
    ev = eigenvalues(P)
    mod = np.abs(ev)
    rho = float(mod.max()) if len(ev) else 0.0
    thresh = tol_one * float(np.max(np.sum(np.abs(P), axis=1), initial=0.0))
    is_one = np.abs(ev - 1.0) <= thresh
    gamma = float(mod[~is_one].max()) if np.any(~is_one) else 0.0
    return SpectrumReport(eigenvalues=ev, rho=rho, gamma=gamma,
                          one_eigenvalue_present=bool(is_one.any()))


def iterations_to_threshold(rho: float, threshold: float = 0.01) -> float:
    """Smallest real ``k`` with ``rho**k <= threshold``: ``log(threshold) / log(rho)``.

    ``inf`` when ``rho >= 1``; ``0`` when ``rho == 0``.
    """
    if rho < 0:
        raise ValueError(f"spectral radius must be nonnegative, got {rho}")
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    if rho == 0:
        return 0.0
    if rho >= 1:
        return math.inf
    return math.log(threshold) / math.log(rho)


def radius(s, singular: bool = False, check: bool = True) -> float:
    """Asymptotic rate of a splitting: ``rho(P)``, or ``gamma(P)`` for singular systems."""
    P = iteration_matrix(s)
    if singular:
        return convergence_factor(P).gamma
    return spectral_radius(P, check=check)
