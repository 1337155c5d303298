"""Krein space core: fundamental symmetries, indefinite products, subspaces."""

from .space import (
    KreinSpace,
    canonical_symmetry,
    indefinite_inner,
    indefinite_square,
    j_adjoint,
    make_krein,
)
from .subspace import (
    MaximalityVerdict,
    SignClass,
    SignKind,
    Subspace,
    cauchy_bunyakovskii_gap,
    classify_subspace,
    compress,
    indefinite_gram,
    is_maximal_semidefinite,
    j_orthogonal_complement,
)

__all__ = [
    "KreinSpace",
    "canonical_symmetry",
    "indefinite_inner",
    "indefinite_square",
    "j_adjoint",
    "make_krein",
    "MaximalityVerdict",
    "SignClass",
    "SignKind",
    "Subspace",
    "cauchy_bunyakovskii_gap",
    "classify_subspace",
    "compress",
    "indefinite_gram",
    "is_maximal_semidefinite",
    "j_orthogonal_complement",
]
