"""Exact spectra, pseudospectra, and condition pseudospectra of operator
pencils over the p-adic numbers."""

from .padic import (
    PAdicContext,
    UltraNorm,
    UltrapencilError,
    cmp_norm,
    padic_abs,
    parse_rational,
    format_rational,
    valuation,
)
from .linalg import Matrix, op_norm, vec_norm
from .pencil import (
    Kappa,
    Pencil,
    RankOnePerturbation,
    affine,
    find_witness,
    in_cond_pseudospectrum,
    in_pseudospectrum,
    in_spectrum,
    kappa,
    rank_one_destabilizer,
    similarity,
)
from .regions import (
    DiagonalPencil,
    PBall,
    RegionDescription,
    SampleGrid,
    cond_region,
    diag_kappa,
    diag_spectrum,
    pseudo_region,
    region_vs_predicate_audit,
    sample,
)
from .sequence import (
    FiniteRankOp,
    TailDiagonalOperator,
    TailDiagonalPencil,
    TailRule,
    essential_spectrum,
    is_completely_continuous,
    regularizer,
    seq_kappa,
    seq_spectrum_membership,
)

__version__ = "0.1.0"
