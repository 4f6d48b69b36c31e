"""Regular splittings of (block) Hessenberg M-matrices and their spectral comparison."""

from hessplit.matcore import (
    BlockPartition,
    MMatrixCertificate,
    certify_m_matrix,
    is_irreducible,
    is_lower_hessenberg,
    is_z_matrix,
    part_extract,
)
from hessplit.splitlib import (
    Splitting,
    SubstitutionOrder,
    classic_splitting,
    find_substitution_order,
    sor_splitting,
    splitting,
    stair_matrix,
    stair_splitting,
    substitution_splitting,
    validate_regular,
)
from hessplit.iterate import (
    IterationHistory,
    iteration_matrix,
    solve_stationary,
    staircase_sweep_two_phase,
    sweep,
)
from hessplit.spectra import (
    SpectrumReport,
    convergence_factor,
    eigenvalues,
    iterations_to_threshold,
    spectral_radius,
)

__version__ = "0.1.0"

__all__ = [
    "BlockPartition",
    "IterationHistory",
    "MMatrixCertificate",
    "SpectrumReport",
    "Splitting",
    "SubstitutionOrder",
    "certify_m_matrix",
    "classic_splitting",
    "convergence_factor",
    "eigenvalues",
    "find_substitution_order",
    "is_irreducible",
    "is_lower_hessenberg",
    "is_z_matrix",
    "iteration_matrix",
    "iterations_to_threshold",
    "part_extract",
    "solve_stationary",
    "sor_splitting",
    "spectral_radius",
    "splitting",
    "stair_matrix",
    "stair_splitting",
    "staircase_sweep_two_phase",
    "substitution_splitting",
    "sweep",
    "validate_regular",
]
