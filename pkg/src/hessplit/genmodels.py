"""Test-matrix generators.

Random draws use NumPy's ``PCG64`` bit generator via
``numpy.random.default_rng(seed)``; the draw order inside each generator is
fixed, so a seed reproduces the same matrix bytes on any platform.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from hessplit.matcore import BlockPartition
from hessplit.mmio import read_matrix_market, read_partition

FAMILIES = ("random_hessenberg", "excess", "two_queue", "file")


def _hessenberg_offdiag(rng, n):
    # uniform [0, 1) on the strict lower triangle plus the superdiagonal
    P = np.tril(rng.random((n, n)), 1)
    np.fill_diagonal(P, 0.0)
    return P


def random_hessenberg_m_matrix(n: int, seed: int):
    """Random nonsingular lower Hessenberg M-matrix with a built-in certificate.

    Off-diagonal magnitudes ``P`` and vectors ``u``, ``v`` are uniform on
    ``[0, 1)``; the diagonal ``d = (v + P u) / u`` then forces ``A u = v``.

    Returns
    -------
    A, u, v : ndarray
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    P = _hessenberg_offdiag(rng, n)
    u = rng.random(n)
    v = rng.random(n)
    d = (v + P @ u) / u
    A = np.diag(d) - P
    return A, u, v


def excess_m_matrix(n: int, eta: float, seed: int) -> np.ndarray:
    """Lower Hessenberg M-matrix with ``A 1 = eta 1``; nearly singular for small ``eta``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    rng = np.random.default_rng(seed)
    P = _hessenberg_offdiag(rng, n)
    d = eta + P.sum(axis=1)
    return np.diag(d) - P


def birth_death_matrix(n: int, s: int, lam: float, mu: float) -> np.ndarray:
    """Tridiagonal single-queue block: arrivals ``lam``, up to ``s`` servers of rate ``mu``.

    Column sums vanish.  Diagonal ``lam + min(i, s) mu`` (0-based ``i``) except
    the last entry ``min(n-1, s) mu``; superdiagonal ``-min(i+1, s) mu``;
    subdiagonal ``-lam``.
    """
    A = np.zeros((n, n))
    for i in range(n):
        A[i, i] = lam + min(i, s) * mu if i < n - 1 else min(n - 1, s) * mu
        if i + 1 < n:
            A[i, i + 1] = -min(i + 1, s) * mu
            A[i + 1, i] = -lam
    return A


def two_queue_generator(n: int, s: int, lam: float, mu: float, lambda1: float):
    """Generator ``Q`` of a two-queue overflow network, ``n^2`` states in ``n`` blocks of ``n``.

    ``Q = -(A kron I + I kron A + lambda1 * diag(0, ..., 0, 1) kron R)`` with
    ``A`` from :func:`birth_death_matrix` and ``R`` lower bidiagonal (1 on the
    diagonal, -1 below, ``R[n-1, n-1] = 0``).  ``-Q`` has zero column sums.

    Returns
    -------
    Q : ndarray, shape (n*n, n*n)
    partition : BlockPartition
    """
    if not (isinstance(n, (int, np.integer)) and isinstance(s, (int, np.integer))):
        raise ValueError("n and s must be integers")
    if not n >= s >= 1:
        raise ValueError(f"need n >= s >= 1, got n={n}, s={s}")
    if n < 2:
        raise ValueError("n must be at least 2")
    for name, val in (("lambda", lam), ("mu", mu), ("lambda1", lambda1)):
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")
    A = birth_death_matrix(n, s, lam, mu)
    R = np.eye(n) - np.eye(n, k=-1)
    R[-1, -1] = 0.0
    E = np.zeros((n, n))
    E[-1, -1] = 1.0
    I = np.eye(n)
    Q = -(np.kron(A, I) + np.kron(I, A) + lambda1 * np.kron(E, R))
    return Q, BlockPartition.uniform(n, n)


def load_generator(path, partition_path=None) -> Tuple[np.ndarray, Optional[BlockPartition]]:
    """Matrix Market file plus optional block-size sidecar."""
    A = read_matrix_market(path)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{path}: matrix is {A.shape[0]}x{A.shape[1]}, expected square")
    partition = read_partition(partition_path, A.shape[0]) if partition_path else None
    return A, partition


@dataclass
class GeneratorSpec:
    """Everything needed to rebuild an experiment matrix."""

    family: str
    n: Optional[int] = None
    seed: Optional[int] = None
    eta: Optional[float] = None
    queue_params: Optional[tuple] = None
    path: Optional[str] = None
    partition_path: Optional[str] = None

    _REQUIRED = {
        "random_hessenberg": {"n", "seed"},
        "excess": {"n", "seed", "eta"},
        "two_queue": {"queue_params"},
        "file": {"path"},
    }
    _OPTIONAL = {"file": {"partition_path"}}

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        given = {k for k in ("n", "seed", "eta", "queue_params", "path", "partition_path")
                 if getattr(self, k) is not None}
        need = self._REQUIRED[self.family]
        allowed = need | self._OPTIONAL.get(self.family, set())
        if not need <= given or not given <= allowed:
            raise ValueError(f"family {self.family!r} takes {sorted(allowed)}, got {sorted(given)}")
        if self.queue_params is not None:
            self.queue_params = tuple(self.queue_params)
            if len(self.queue_params) != 5:
                raise ValueError("queue_params is (n, s, lambda, mu, lambda1)")

    def build(self):
        """Return ``(matrix, partition)``; ``partition`` is ``None`` except for block sources."""
        if self.family == "random_hessenberg":
            return random_hessenberg_m_matrix(self.n, self.seed)[0], None
        if self.family == "excess":
            return excess_m_matrix(self.n, self.eta, self.seed), None
        if self.family == "two_queue":
            qn, qs, lam, mu, l1 = self.queue_params
            return two_queue_generator(int(qn), int(qs), lam, mu, l1)
        return load_generator(self.path, self.partition_path)

    def describe(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if v is not None and v != {}}
        if "queue_params" in d:
            d["queue_params"] = list(d["queue_params"])
        return d
