"""Spectral radii, Perron eigendata and coefficient spaces of positive maps
on block-diagonal matrix algebras."""

from .errors import (
    BudgetExceededError,
    ConvergenceError,
    CpspectraError,
    FormatError,
    PreconditionError,
)
from .mats import (
    CONV_TOL,
    PSD_TOL,
    RANK_TOL,
    PsdReport,
    Tolerance,
    as_matrix,
    eigenvalues,
    hs_inner,
    hs_norm,
    inverse,
    kron,
    mat_exp,
    mat_power,
    matrix_from_json,
    matrix_to_json,
    numerical_rank,
    op_norm,
    psd_report,
    psd_sqrt,
    spectral_radius,
    unvec,
    vec,
)
from .algebra import AlgebraShape, compress, compress_superop, embed, in_algebra, split
from .cpmap import (
    AlgebraMap,
    CoefficientSpace,
    CpMap,
    MembershipResult,
    SuperOperator,
    algebra_map,
    canonical_extension,
    choi_of,
    choi_of_superop,
    choi_rank,
    coefficient_space,
    compose,
    dominates,
    is_cp,
    kraus_of_choi,
    map_power,
    membership,
    preserves_algebra,
    superop_of,
)
from .spectra import (
    BalanceResult,
    JsrEstimate,
    NormAchievingResult,
    balance_similarity,
    conjugate_map,
    friedland_value,
    jsr_brute,
    jsr_tensor_approx,
    neumann_witness,
    norm_achieving_check,
    outer_radius,
    outer_radius_gelfand,
    positive_map_norm,
    scaled_outer_radius,
    singular_psd_combination,
    spectral_radius_of,
)
from .perron import (
    EigenCluster,
    Factorization,
    GeneratedAlgebra,
    IdealCheck,
    IrreducibilityReport,
    MaximalPart,
    SpectralStructure,
    algebra_basis,
    exp_eta,
    irreducible_cp,
    maximal_factorization,
    maximal_ideal_check,
    maximal_part,
    perron_vector,
    resolvent_gamma,
    spectral_structure,
)
from .reference_maps import (
    bundled_maps,
    double_trace_map,
    golden_ratio_map,
    path_adjacency_map,
    trace_corner_map,
)

__version__ = "0.1.0"
