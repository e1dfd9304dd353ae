"""Finite-simplex information geometry with mechanized checks."""

from .errors import *  # noqa: F401,F403
from .simplex import (
    SimplexPoint,
    TangentVector,
    ZCoordinates,
    barycenter,
    e_diff,
    from_z_coords,
    make_point,
    make_tangent,
    point_of_u,
    random_point,
    random_tangent,
    to_z_coords,
    z_basis,
    z_coords,
)
from .embeddings import (
    EmbeddingMap,
    MarkovPartition,
    MarkovPatch,
    apply,
    compose,
    compose_all,
    differential,
    h_ij,
    h_ijk,
    identity_embedding,
    is_scalar,
    markov_embedding,
    patched_embedding,
    permutation_embedding,
    scalar_patched,
)
from .tensors import (
    ConeMetric,
    TensorField,
    cone_eval,
    custom,
    fisher,
    gram,
    iota_pullback,
    j_pullback,
    pullback,
    scaled,
    tensor_d,
    tensor_lm,
    tensor_s,
)
from .verify import (
    CheckReport,
    FamilyOracle,
    Grid,
    M_profile,
    barycenter_quantity,
    check_C1,
    check_C2,
    check_family_invariance,
    check_sym_u,
    factorization_check_markov,
    factorization_check_patched,
    reconstruct_lambda,
    reconstruct_mu,
)
from .kernels import BACKEND

__version__ = "0.1.0"
