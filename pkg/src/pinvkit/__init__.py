"""Structure-exploiting Moore-Penrose pseudoinverse toolkit.

A dense complex SVD oracle plus the closed-form pseudoinverse paths it
cross-checks: orthogonal sum decompositions, rank completion, circulant
algebra, and distance matrices of zero-sum weighted trees and odd wheel
graphs.
"""

from .matrix import (
    DEFAULT_TOL,
    UNIT_ROUNDOFF,
    ConvergenceError,
    MatrixFormatError,
    PreconditionError,
    Tolerance,
    VerificationError,
    as_matrix,
    as_vector,
    dagger,
    frobenius,
)
from .linalg import SvdFactorization, hermitian_eigenvalues, random_unitary, svd
from .core import (
    ResidualReport,
    characterization_residuals,
    gen_random_matrix,
    is_134_inverse,
    penrose_residuals,
    pinv,
    pinv_normal_equations,
    projectors,
)
from .sumdecomp import (
    CompletionData,
    OperatorFamily,
    OrthogonalityCertificate,
    auto_completion,
    check_orthogonality,
    completion_pinv_pair,
    fill_fishkind_pinv,
    gen_rank_additive_pair,
    gen_shared_subspace_triple,
    gen_svd_block_family,
    pinv_invertible_projector_eq,
    pinv_sum,
    pinv_via_gram_equation,
    rank_completion_pinv,
)
from .circulant import (
    Circulant,
    Spectrum,
    block_pattern_coefficients,
    block_pattern_generator,
    block_pattern_pinv,
    circ_materialize,
    circ_mul,
    circ_pinv_spectral,
    circ_spectrum,
    generator_from_spectrum,
    rho,
    shift_power,
    support_split_pinv,
    two_term_pinv,
    zero_sum_shift_pinv,
)
from .graphdist import (
    TreeMatrices,
    WheelGraph,
    gen_zero_sum_tree,
    tree_build,
    tree_pinv,
    tree_shift_inverse,
    tree_u_and_reconstruction,
    wheel_build,
    wheel_pinv,
    wheel_properties,
    wheel_z,
    wheel_z_identities,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "UNIT_ROUNDOFF",
    "Circulant",
    "CompletionData",
    "ConvergenceError",
    "MatrixFormatError",
    "OperatorFamily",
    "OrthogonalityCertificate",
    "PreconditionError",
    "ResidualReport",
    "Spectrum",
    "SvdFactorization",
    "Tolerance",
    "TreeMatrices",
    "VerificationError",
    "WheelGraph",
    "as_matrix",
    "as_vector",
    "auto_completion",
    "block_pattern_coefficients",
    "block_pattern_generator",
    "block_pattern_pinv",
    "characterization_residuals",
    "check_orthogonality",
    "circ_materialize",
    "circ_mul",
    "circ_pinv_spectral",
    "circ_spectrum",
    "completion_pinv_pair",
    "dagger",
    "fill_fishkind_pinv",
    "frobenius",
    "gen_random_matrix",
    "gen_rank_additive_pair",
    "gen_shared_subspace_triple",
    "gen_svd_block_family",
    "gen_zero_sum_tree",
    "generator_from_spectrum",
    "hermitian_eigenvalues",
    "is_134_inverse",
    "penrose_residuals",
    "pinv",
    "pinv_invertible_projector_eq",
    "pinv_normal_equations",
    "pinv_sum",
    "pinv_via_gram_equation",
    "projectors",
    "random_unitary",
    "rank_completion_pinv",
    "rho",
    "shift_power",
    "support_split_pinv",
    "svd",
    "tree_build",
    "tree_pinv",
    "tree_shift_inverse",
    "tree_u_and_reconstruction",
    "two_term_pinv",
    "wheel_build",
    "wheel_pinv",
    "wheel_properties",
    "wheel_z",
    "wheel_z_identities",
    "zero_sum_shift_pinv",
]
