"""Experiment drivers producing the CSV tables (radius comparisons, excess sweep, SOR sweep)."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from hessplit.genmodels import GeneratorSpec
from hessplit.matcore import BlockPartition, flip, is_lower_hessenberg
from hessplit.singular import column_sums_vanish, primed_splitting
from hessplit.splitlib import sor_splitting, splitting
from hessplit.spectra import iterations_to_threshold, radius

log = logging.getLogger(__name__)

COMPARE_HEADER = ("expnumber", "rhoGS", "rhoS", "rhoAGS")
EXCESS_HEADER = ("excess", "rhoGS", "rhoS", "rhoAGS", "logGS", "logS", "logAGS")
BLOCK_HEADER = ("K", "rhoGSOR", "rhoSTSOR", "rhoSTSOR2", "rhoAGSOR")
SOR_HEADER = ("omega", "rhoGSOR", "rhoSTSOR", "rhoSTSOR2", "rhoAGSOR")
SOR_KIND_COLUMNS = ("gsor", "stsor", "stsor2", "agsor")

DEFAULT_OMEGAS = tuple(round(0.05 * i, 2) for i in range(1, 43))  # 0.05 .. 2.10
DEFAULT_ETAS = tuple(float(x) for x in np.logspace(-8, 2, 50))


def fmt(x) -> str:
    return format(float(x), ".17g")


def to_csv(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        if any(isinstance(v, float) and math.isnan(v) for v in row):
            raise ValueError(f"NaN in result row {row}")
        w.writerow([str(v) if isinstance(v, (int, np.integer)) else fmt(v) for v in row])
    return buf.getvalue()


def three_radii(A, partition: Optional[BlockPartition] = None):
    return tuple(radius(splitting(A, k, partition)) for k in ("gs", "stair1", "ags"))


def compare_rows(n: int = 5, trials: int = 50, seed: int = 0) -> List[tuple]:
    """Radii of GS, first-order stair and AGS on ``trials`` random matrices.

    Trial ``t`` uses seed ``seed + t``.  Rows are sorted by decreasing GS
    radius and numbered from 1 in that order.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    results = []
    for t in range(trials):
        spec = GeneratorSpec("random_hessenberg", n=n, seed=seed + t)
        log.info("trial %d: %s", t, spec.describe())
        A, _ = spec.build()
        results.append(three_radii(A))
    results.sort(key=lambda r: -r[0])
    return [(i + 1, *r) for i, r in enumerate(results)]


def excess_rows(n: int = 5, etas: Sequence[float] = DEFAULT_ETAS, seed: int = 0,
                repeats: int = 1) -> List[tuple]:
    """Radii and iterations-to-0.01 for matrices with ``A 1 = eta 1``.

    Each ``eta`` (index ``i``) gets ``repeats`` matrices with seeds
    ``seed + i * repeats + r``.
    """
    rows = []
    for i, eta in enumerate(etas):
        if not eta > 0:
            raise ValueError(f"eta must be positive, got {eta}")
        for r in range(repeats):
            spec = GeneratorSpec("excess", n=n, eta=float(eta), seed=seed + i * repeats + r)
            log.info("%s", spec.describe())
            A, _ = spec.build()
            rad = three_radii(A)
            rows.append((float(eta), *rad, *(iterations_to_threshold(x) for x in rad)))
    rows.sort(key=lambda r: r[0])
    return rows


@dataclass
class PreparedMatrix:
    A: np.ndarray
    partition: Optional[BlockPartition]
    singular: bool
    negated: bool
    flipped: bool


def prepare_matrix(raw, partition: Optional[BlockPartition] = None, flip_order: bool = False,
                   transpose: bool = False, tol: float = 1e-12) -> PreparedMatrix:
    """Turn a source matrix into the M-matrix ``A`` the splittings act on.

    A generator (nonpositive diagonal, nonnegative off-diagonal) is negated.
    ``transpose`` is explicit and never guessed.  ``flip_order`` relabels all
    indices in reverse (block sizes reversed too), turning upper Hessenberg
    into lower Hessenberg.  The system counts as singular when the column sums
    of ``A`` vanish.
    """
    A = np.array(raw, dtype=float)
    n = A.shape[0]
    off = ~np.eye(n, dtype=bool)
    negated = bool(np.all(np.diag(A) <= 0) and np.all(A[off] >= 0) and np.any(A != 0))
    if negated:
        A = -A
    if transpose:
        A = A.T.copy()
    if flip_order:
        A = flip(A)
        if partition is not None:
            partition = BlockPartition(partition.sizes[::-1])
    singular = column_sums_vanish(A, tol)
    if not singular and column_sums_vanish(A.T, tol):
        raise ValueError("row sums vanish but column sums do not; pass transpose=True (--transpose)")
    if not is_lower_hessenberg(A, partition, tol):
        if is_lower_hessenberg(A.T, partition, tol):
            log.warning("matrix is upper Hessenberg, not lower: GS/AGS roles are exchanged; "
                        "use --flip to relabel so that AGS is the fast method")
        else:
            log.warning("matrix is not (block) lower Hessenberg; comparison theorems do not apply")
    return PreparedMatrix(A=A, partition=partition, singular=singular, negated=negated, flipped=flip_order)


def sor_radii(prep: PreparedMatrix, omega: float, block: bool = True) -> tuple:
    part = prep.partition if block else None
    out = []
    for kind in SOR_KIND_COLUMNS:
        if prep.singular:
            s = primed_splitting(prep.A, kind, part, omega=omega)
        else:
            s = sor_splitting(prep.A, kind, omega, part)
        out.append(radius(s, singular=prep.singular))
    return tuple(out)


def sor_sweep_rows(source: GeneratorSpec, omegas: Sequence[float] = DEFAULT_OMEGAS, block: bool = True,
                   flip_order: bool = False, transpose: bool = False) -> List[tuple]:
    """Radius (``gamma`` for singular inputs) of the four SOR variants over an ``omega`` grid."""
    log.info("source: %s", source.describe())
    raw, partition = source.build()
    if block and partition is None:
        raise ValueError("block splittings requested but the source has no partition")
    prep = prepare_matrix(raw, partition, flip_order=flip_order, transpose=transpose)
    log.info("matrix %dx%d, negated=%s, singular=%s, flipped=%s, block=%s",
             prep.A.shape[0], prep.A.shape[1], prep.negated, prep.singular, prep.flipped, block)
    if flip_order:
        log.info("reversed ordering: GSOR here is AGSOR of the original matrix and vice versa")
    rows = []
    for w in sorted(omegas):
        if not w > 0:
            raise ValueError(f"omega must be positive, got {w}")
        rows.append((float(w), *sor_radii(prep, w, block)))
    return rows


def near_uniform_partition(n: int, K: int) -> BlockPartition:
    """``K`` contiguous blocks whose sizes differ by at most one, larger blocks first."""
    if not 1 <= K <= n:
        raise ValueError(f"block count must be in [1, {n}], got {K}")
    q, r = divmod(n, K)
    return BlockPartition(tuple([q + 1] * r + [q] * (K - r)))


def block_count_rows(source: GeneratorSpec, counts: Sequence[int], omega: float = 1.0,
                     flip_order: bool = False, transpose: bool = False) -> List[tuple]:
    """SOR radii at fixed ``omega`` as the matrix is cut into ``K`` near-uniform blocks.

    Only file-loaded sources make sense here: generated families fix their own
    partition.
    """
    if source.family != "file":
        raise ValueError("block-count sweeps need a file-loaded matrix")
    log.info("source: %s", source.describe())
    raw, _ = source.build()
    rows = []
    for K in sorted(set(int(k) for k in counts)):
        part = near_uniform_partition(raw.shape[0], K)
        prep = prepare_matrix(raw, part, flip_order=flip_order, transpose=transpose)
        rows.append((K, *sor_radii(prep, omega, block=True)))
    return rows
