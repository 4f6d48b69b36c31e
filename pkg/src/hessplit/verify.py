"""Randomized property suites for the comparison theorems, runnable from the CLI.

Every suite returns a :class:`SuiteReport`.  ``worst_margin`` is the largest
signed violation observed (``lhs - rhs`` for an inequality ``lhs <= rhs``,
deviation minus tolerance for an equality), so a suite passes exactly when
no check had a positive margin.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from hessplit.genmodels import random_hessenberg_m_matrix
from hessplit.iterate import iteration_matrix
from hessplit.singular import primed_splitting, random_singular_hessenberg
from hessplit.spectra import convergence_factor, eigenvalues, spectral_radius
from hessplit.splitlib import custom_splitting, splitting, substitution_splitting
from hessplit.walkoracle import (
    check_comparison_inequality,
    ags_power_matrix,
    enumerated_class_sums,
    gs_bound_matrix,
    tail_bound,
    walk_frontiers,
)

log = logging.getLogger(__name__)

SUITES = ("theorems", "exchange", "substitution", "singular", "walks")


@dataclass
class SuiteReport:
    suite: str
    checks: int = 0
    failures: int = 0
    worst_margin: float = -np.inf
    instances: int = 0
    seconds: float = 0.0
    details: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.checks > 0

    def record(self, margin: float, what: str = "") -> None:
        """Count one check; ``margin > 0`` is a failure."""
        self.checks += 1
        margin = float(margin)
        if not np.isfinite(margin) and margin != -np.inf:
            margin = np.inf
        if margin > self.worst_margin:
            self.worst_margin = margin
        if margin > 0:
            self.failures += 1
            if len(self.details) < 20:
                self.details.append(f"{what}: margin {margin:.3e}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        d["worst_margin"] = None if self.worst_margin == -np.inf else self.worst_margin
        return d


def _ordering(report, values, names, slack, tag):
    for (a, b), (na, nb) in zip(zip(values, values[1:]), zip(names, names[1:])):
        report.record(b - a - slack, f"{tag}: {na}={a!r} < {nb}={b!r}")


def theorems(seed: int = 1, trials: int = 500, slack: float = 1e-10) -> SuiteReport:
    """``rho_J >= rho_GS >= rho_S1 >= rho_AGS`` and ``rho_S2 >= rho_AGS`` on random matrices.

    Trial ``t`` uses seed ``seed + t`` and order ``n = 3 + (seed + t) % 10``.
    """
    rep = SuiteReport("theorems")
    for t in range(trials):
        sd = seed + t
        n = 3 + sd % 10
        A = random_hessenberg_m_matrix(n, sd)[0]
        r = {k: spectral_radius(iteration_matrix(splitting(A, k))) for k in ("jacobi", "gs", "stair1", "stair2", "ags")}
        _ordering(rep, [r["jacobi"], r["gs"], r["stair1"], r["ags"]], ["J", "GS", "S1", "AGS"], slack, f"seed {sd}")
        rep.record(r["ags"] - r["stair2"] - slack, f"seed {sd}: S2 < AGS")
        rep.instances += 1
    return rep


def sorted_spectrum(P, key_decimals: int = 7) -> np.ndarray:
    """Eigenvalues sorted by (real, imag), with sort keys rounded so near-ties keep a stable order."""
    ev = eigenvalues(P)
    idx = np.lexsort((np.round(ev.imag, key_decimals), np.round(ev.real, key_decimals)))
    return ev[idx]


def exchange_instance(rng: np.random.Generator, n: int):
    """Two regular splittings of one matrix sharing diagonal blocks, lower and upper block coupling.

    Returns ``(A, M, M_hat, k)``; ``M`` keeps ``A21``, ``M_hat`` keeps ``A12``.
    """
    P = rng.random((n, n)) * (rng.random((n, n)) < 0.7)
    np.fill_diagonal(P, 0.0)
    u = rng.random(n) + 0.1
    v = rng.random(n) + 0.01
    A = np.diag((v + P @ u) / u) - P
    k = int(rng.integers(1, n))
    blk = A.copy()
    blk[:k, k:] = 0.0
    blk[k:, :k] = 0.0
    drop = (rng.random((n, n)) < 0.5) & ~np.eye(n, dtype=bool)
    blk[drop] = 0.0
    M = blk.copy()
    M[k:, :k] = A[k:, :k]
    M_hat = blk.copy()
    M_hat[:k, k:] = A[:k, k:]
    return A, M, M_hat, k


def exchange(seed: int = 1, trials: int = 200, tol: float = 1e-8) -> SuiteReport:
    """Equal spectra of ``M^{-1}N`` and ``M_hat^{-1}N_hat`` for block 2x2 splittings.

    Also checks the comparison consequence: dropping part of the lower
    coupling from ``M`` (giving ``M'``) can only slow convergence relative to
    ``M_hat``.
    """
    rep = SuiteReport("exchange")
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(2, 9))
        A, M, M_hat, k = exchange_instance(rng, n)
        s, s_hat = custom_splitting(A, M), custom_splitting(A, M_hat)
        if not (s.regular and s_hat.regular):
            rep.record(np.inf, f"trial {t}: instance not regular")
            continue
        ev = sorted_spectrum(iteration_matrix(s))
        ev_hat = sorted_spectrum(iteration_matrix(s_hat))
        rep.record(np.max(np.abs(ev - ev_hat)) - tol, f"trial {t} (n={n}, k={k})")
        M_prime = M.copy()
        M_prime[k:, :k] *= rng.random((n - k, k)) < 0.5
        r_prime = spectral_radius(iteration_matrix(custom_splitting(A, M_prime)))
        rep.record(np.max(np.abs(ev_hat)) - r_prime - 1e-10, f"trial {t}: corollary")
        rep.instances += 1
    return rep


def substitution(seed: int = 1, trials: int = 200, perms: int = 20, slack: float = 1e-10) -> SuiteReport:
    """Every substitution-order splitting converges no faster than AGS."""
    rep = SuiteReport("substitution")
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(3, 9))
        A = random_hessenberg_m_matrix(n, seed + t)[0]
        r_ags = spectral_radius(iteration_matrix(splitting(A, "ags")))
        for _ in range(perms):
            order = rng.permutation(n)
            r = spectral_radius(iteration_matrix(substitution_splitting(A, order)))
            rep.record(r_ags - r - slack, f"trial {t}: order {order.tolist()}")
        rep.instances += 1
    return rep


def singular(seed: int = 1, trials: int = 100, slack: float = 1e-9) -> SuiteReport:
    """``gamma`` ordering J >= GS >= S1 >= AGS on primed splittings, plus unit-eigenvalue detection."""
    rep = SuiteReport("singular")
    for t in range(trials):
        sd = seed + t
        n = 3 + sd % 8
        A = random_singular_hessenberg(n, sd)
        g = []
        for kind in ("jacobi", "gs", "stair1", "ags"):
            sr = convergence_factor(iteration_matrix(primed_splitting(A, kind)))
            rep.record(-np.inf if sr.one_eigenvalue_present else np.inf, f"seed {sd}: {kind} lost eigenvalue 1")
            g.append(sr.gamma)
        _ordering(rep, g, ["J", "GS", "S1", "AGS"], slack, f"seed {sd}")
        rep.instances += 1
    return rep


def random_substochastic_hessenberg(rng: np.random.Generator, n: int, row_max: float = 1.0) -> np.ndarray:
    """Lower Hessenberg ``T >= 0`` with row sums uniform on ``(0, row_max]``."""
    T = np.tril(rng.random((n, n)), 1)
    T *= (row_max * (1.0 - rng.random(n)) / T.sum(axis=1))[:, None]
    return T


def walks(seed: int = 1, trials: int = 100, n_max: int = 4, length: int = 12,
          slack: float = 1e-12) -> SuiteReport:
    """Walk-combinatorics checks on lower Hessenberg chains.

    * every walk of at most ``length`` moves on the full Hessenberg pattern of
      order ``2..n_max`` has ``downward <= upward + n - 1`` and alternating
      level crossings;
    * the closed-form inequality between the two walk-class matrices, for
      ``trials`` random ``T`` of order ``2..6`` and ``k = n-1 .. n+4``;
    * truncated walk sums stay within the tail bound below the closed forms
      (order up to ``n_max``, row sums at most 1/2).
    """
    rep = SuiteReport("walks")
    for n in range(2, n_max + 1):
        T = np.tril(np.ones((n, n)), 1) / n
        for f in walk_frontiers(T, length):
            if len(f["end"]) == 0:
                continue
            rep.record(np.max(f["down"] - f["up"]) - (n - 1), f"n={n}: combinatorial lemma")
            if n > 1:
                rep.record(np.max(np.abs(f["level_up"] - f["level_down"])) - 1, f"n={n}: alternation")
        rep.instances += 1
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(2, 7))
        T = random_substochastic_hessenberg(rng, n, 0.95)
        cr = check_comparison_inequality(T, n + 4, slack)
        rep.record(cr.max_violation - slack, f"trial {t} (n={n}): k={cr.worst_k} entry {cr.worst_entry}")
        rep.instances += 1
    for t in range(max(1, trials // 10)):
        n = int(rng.integers(2, n_max + 1))
        T = random_substochastic_hessenberg(rng, n, 0.5)
        tail = tail_bound(T, length)
        for k, (ags, gs) in enumerated_class_sums(T, range(n - 1, n + 2), length).items():
            for name, exact, part in (("ags", ags_power_matrix(T, k), ags), ("gs", gs_bound_matrix(T, k), gs)):
                gap = exact - part
                rep.record(max(np.max(gap) - tail, -np.min(gap) - slack), f"enumeration n={n} k={k} {name}")
        rep.instances += 1
    return rep


_RUNNERS: Dict[str, Callable[..., SuiteReport]] = {
    "theorems": theorems,
    "exchange": exchange,
    "substitution": substitution,
    "singular": singular,
    "walks": walks,
}


def run_suite(suite: str, seed: int = 1, trials: Optional[int] = None) -> List[SuiteReport]:
    """Run one suite (or ``all``); ``trials=None`` keeps each suite's default."""
    if suite != "all" and suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES + ('all',)}")
    names = SUITES if suite == "all" else (suite,)
    out = []
    for name in names:
        kwargs = {"seed": seed}
        if trials is not None:
            kwargs["trials"] = trials
        t0 = time.perf_counter()
        rep = _RUNNERS[name](**kwargs)
        rep.seconds = time.perf_counter() - t0
        log.info("suite %s: %d/%d checks passed, worst margin %s", name,
                 rep.checks - rep.failures, rep.checks, rep.worst_margin)
        out.append(rep)
    return out


def reports_json(reports: List[SuiteReport]) -> str:
    body = {"passed": all(r.passed for r in reports), "suites": [r.to_dict() for r in reports]}
    return json.dumps(body, indent=2)
