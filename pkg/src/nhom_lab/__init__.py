"""Construct and verify n-homomorphisms between finite-dimensional C*-algebras."""
from .algebra import (
    AlgebraDescriptor,
    AlgebraElement,
    adjoint,
    factor,
    is_positive,
    operator_norm,
    product,
    random_element,
    spectrum,
)
from .estimators import NHomDecomposer, NPartitionTransformer
from .exceptions import *  # noqa: F401,F403
from .harness import HarnessConfig, TheoremReport, run_harness
from .nhom import (
    DecompositionResult,
    LinearMapRep,
    VerificationReport,
    apply,
    coherent_factorization_check,
    decompose_full,
    from_orthogonal_homs,
    is_n_homomorphism,
    is_star_linear,
    orthogonal_split_full,
    positive_nhom_check,
    split_involutive,
    unital_decompose,
    unitize,
)
from .npotent import (
    NPartition,
    classify_selfadjoint_npotent,
    is_npotent,
    lagrange_polynomial,
    partition_of_unity,
    roots_sigma,
)
from .positivity import (
    amplify,
    choi_matrix,
    contractivity_check,
    cstar_identity_check,
    harris_solvability,
    is_completely_positive,
    spectral_inclusion_check,
)

__version__ = "0.1.0"
