"""Walk enumeration on substochastic chains.

For ``A = I - T`` with ``T`` substochastic, ``T = D + L + U`` splits the
transitions into self-loops, downward moves (to a smaller state) and upward
moves.  Summing walk probabilities over two classes of walks gives

* walks with exactly ``k`` downward moves, the last move downward:
  ``((I - D - U)^{-1} L)^k``, i.e. ``P_AGS^k``;
* walks with at least ``k - n + 1`` upward moves:
  ``((I - D - L)^{-1} U)^{k-n+1} (I - T)^{-1}``.

On lower Hessenberg ``T`` every walk with ``k`` downward moves has at least
``k - n + 1`` upward ones, so the first matrix is entrywise below the second.
This module enumerates walks exhaustively to check those statements.

States are 0-based here: ``walk_stats((3, 0), 4)`` is the move from the top
state of a 4-state chain to the bottom one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Tuple

import numpy as np

from hessplit.matcore import as_square

DEFAULT_CAP = 10_000_000


class EnumerationTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class WalkStats:
    downward: int
    upward: int
    level_up: Tuple[int, ...]
    level_down: Tuple[int, ...]


def decompose_substochastic(A, tol: float = 1e-12):
    """Return ``(T, D, L, U)`` with ``T = I - A`` split into diagonal, strict lower, strict upper."""
    A = as_square(A)
    T = np.eye(A.shape[0]) - A
    if np.any(T < -tol):
        i, j = np.argwhere(T < -tol)[0]
        raise ValueError(f"T = I - A has negative entry {T[i, j]:.3g} at ({i}, {j})")
    rows = T.sum(axis=1)
    bad = np.flatnonzero(rows > 1 + tol)
    if len(bad):
        raise ValueError(f"T is not substochastic: row {bad[0]} sums to {rows[bad[0]]!r}")
    D = np.diag(np.diag(T))
    return T, D, np.tril(T, -1), np.triu(T, 1)


def walk_stats(states, n: int) -> WalkStats:
    """Transition counts of a walk, overall and across each cut ``{0..h} | {h+1..n-1}``."""
    states = list(states)
    up = down = 0
    lvl_up = [0] * (n - 1)
    lvl_down = [0] * (n - 1)
    for a, b in zip(states, states[1:]):
        if b > a:
            up += 1
            for h in range(a, b):
                lvl_up[h] += 1
        elif b < a:
            down += 1
            for h in range(b, a):
                lvl_down[h] += 1
    return WalkStats(down, up, tuple(lvl_up), tuple(lvl_down))


def enumerate_walks(T, max_transitions: int, cap: int = DEFAULT_CAP) -> Iterator[Tuple[tuple, float]]:
    """Yield every walk of 1..``max_transitions`` transitions with positive probability.

    Walks come as ``(states, probability)`` in depth-first order.  Raises
    :class:`EnumerationTooLarge` once more than ``cap`` walks were produced.
    """
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    succ = [np.flatnonzero(T[i] > 0) for i in range(n)]
    count = 0
    stack: List[Tuple[tuple, float]] = [((i,), 1.0) for i in range(n - 1, -1, -1)]
    while stack:
        walk, p = stack.pop()
        if len(walk) > 1:
            count += 1
            if count > cap:
                raise EnumerationTooLarge("enumeration too large")
            yield walk, p
        if len(walk) - 1 < max_transitions:
            last = walk[-1]
            for j in succ[last][::-1]:
                stack.append((walk + (int(j),), p * T[last, j]))


def walk_frontiers(T, max_transitions: int, cap: int = DEFAULT_CAP):
    """Breadth-first, vectorised walk enumeration.

    Yields, for each length ``l = 0..max_transitions``, a dict of arrays over
    all positive-probability walks of that length: ``start``, ``end``,
    ``prob``, ``up``, ``down``, ``last_down`` (last move was downward),
    ``level_up`` and ``level_down`` (shape ``(count, n-1)``).
    """
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    starts = np.arange(n)
    f = dict(start=starts, end=starts.copy(), prob=np.ones(n),
             up=np.zeros(n, dtype=np.int64), down=np.zeros(n, dtype=np.int64),
             last_down=np.zeros(n, dtype=bool),
             level_up=np.zeros((n, max(n - 1, 0)), dtype=np.int64),
             level_down=np.zeros((n, max(n - 1, 0)), dtype=np.int64))
    total = 0
    h = np.arange(n - 1)
    src, dst = np.nonzero(T > 0)
    pick = [np.flatnonzero(src == e) for e in range(n)]
    yield f
    for _ in range(max_transitions):
        # expand every walk by every allowed move out of its end state
        counts = np.array([len(pick[e]) for e in f["end"]], dtype=np.int64)
        total += int(counts.sum())
        if total > cap:
            raise EnumerationTooLarge("enumeration too large")
        parent = np.repeat(np.arange(len(f["end"])), counts)
        if len(parent) == 0:
            return
        move = np.concatenate([pick[e] for e in f["end"]])
        a, b = src[move], dst[move]
        goes_up, goes_down = b > a, b < a
        crossed_up = goes_up[:, None] & (h[None, :] >= a[:, None]) & (h[None, :] < b[:, None])
        crossed_down = goes_down[:, None] & (h[None, :] >= b[:, None]) & (h[None, :] < a[:, None])
        f = dict(start=f["start"][parent], end=b,
                 prob=f["prob"][parent] * T[a, b],
                 up=f["up"][parent] + goes_up, down=f["down"][parent] + goes_down,
                 last_down=goes_down,
                 level_up=f["level_up"][parent] + crossed_up,
                 level_down=f["level_down"][parent] + crossed_down)
        yield f


def ags_power_matrix(T, k: int) -> np.ndarray:
    """``((I - D - U)^{-1} L)^k``: walks with exactly ``k`` downward moves, ending with one."""
    T = as_square(T, "T")
    n = T.shape[0]
    if k < 0:
        raise ValueError("k must be nonnegative")
    D, L, U = np.diag(np.diag(T)), np.tril(T, -1), np.triu(T, 1)
    try:
        P = np.linalg.solve(np.eye(n) - D - U, L)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("I - D - U is singular") from exc
    return np.linalg.matrix_power(P, k)


def gs_bound_matrix(T, k: int) -> np.ndarray:
    """``((I - D - L)^{-1} U)^{k-n+1} (I - T)^{-1}``: walks with at least ``k-n+1`` upward moves."""
    T = as_square(T, "T")
    n = T.shape[0]
    if k < n - 1:
        raise ValueError(f"k must be at least n - 1 = {n - 1}")
    D, L, U = np.diag(np.diag(T)), np.tril(T, -1), np.triu(T, 1)
    try:
        P = np.linalg.solve(np.eye(n) - D - L, U)
        R = np.linalg.inv(np.eye(n) - T)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("I - D - L or I - T is singular") from exc
    return np.linalg.matrix_power(P, k - n + 1) @ R


@dataclass
class ComparisonReport:
    passed: bool
    max_violation: float
    worst_k: int
    worst_entry: Tuple[int, int]
    ks: Tuple[int, ...]


def check_comparison_inequality(T, k_max: int, slack: float = 1e-12) -> ComparisonReport:
    """Check ``P_AGS^k <= P_GS^{k-n+1} (I-T)^{-1}`` entrywise for ``k = n-1 .. k_max``.

    ``max_violation`` is the largest ``lhs - rhs`` seen (negative when the
    inequality holds with room to spare).
    """
    T = as_square(T, "T")
    n = T.shape[0]
    worst, worst_k, worst_ij = -np.inf, n - 1, (0, 0)
    ks = tuple(range(n - 1, k_max + 1))
    for k in ks:
        gap = ags_power_matrix(T, k) - gs_bound_matrix(T, k)
        ij = np.unravel_index(np.argmax(gap), gap.shape)
        if gap[ij] > worst:
            worst, worst_k, worst_ij = float(gap[ij]), k, (int(ij[0]), int(ij[1]))
    return ComparisonReport(passed=bool(worst <= slack), max_violation=worst,
                            worst_k=worst_k, worst_entry=worst_ij, ks=ks)


def enumerated_class_matrices(T, k: int, max_transitions: int, cap: int = DEFAULT_CAP):
    """Truncated walk sums for the two walk classes of index ``k``.

    Returns ``(ags_part, gs_part)``: the summed probabilities of walks of at
    most ``max_transitions`` moves with exactly ``k`` downward moves ending
    in a downward move, and of walks with at least ``k - n + 1`` upward moves.
    Both underestimate their closed forms by at most the geometric tail
    ``||T||_inf^(max_transitions+1) / (1 - ||T||_inf)``.
    """
    return enumerated_class_sums(T, [k], max_transitions, cap)[k]


def enumerated_class_sums(T, ks, max_transitions: int, cap: int = DEFAULT_CAP):
    """:func:`enumerated_class_matrices` for several ``k`` from a single enumeration.

    Returns a dict mapping each ``k`` to ``(ags_part, gs_part)``.
    """
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    ks = sorted(set(int(k) for k in ks))
    out = {k: (np.zeros((n, n)), np.zeros((n, n))) for k in ks}
    for length, f in enumerate(walk_frontiers(T, max_transitions, cap)):
        for k in ks:
            ags, gs = out[k]
            if k == 0:
                sel = np.full(len(f["end"]), length == 0)
            else:
                sel = (f["down"] == k) & f["last_down"]
            np.add.at(ags, (f["start"][sel], f["end"][sel]), f["prob"][sel])
            sel = f["up"] >= k - n + 1
            np.add.at(gs, (f["start"][sel], f["end"][sel]), f["prob"][sel])
    return out


def tail_bound(T, max_transitions: int) -> float:
    """Upper bound on the probability mass of walks longer than ``max_transitions``."""
    r = float(np.max(np.sum(np.abs(T), axis=1)))
    if r >= 1:
        return np.inf
    return r ** (max_transitions + 1) / (1 - r)
