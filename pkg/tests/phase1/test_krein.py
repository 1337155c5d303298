"""
Phase 1 Test - Krein spaces and subspaces
Indefinite inner products, J-adjoints and sign classification of subspaces.
"""

import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.krein import (
    SignKind,
    Subspace,
    cauchy_bunyakovskii_gap,
    classify_subspace,
    compress,
    indefinite_gram,
    indefinite_inner,
    indefinite_square,
    is_maximal_semidefinite,
    j_adjoint,
    j_orthogonal_complement,
    make_krein,
)
from src.utils.errors import (
    DimensionMismatch,
    EmptySpace,
    NonOrthonormalBasis,
    NotHermitian,
    NotInvolutive,
    NotSemidefinite,
)

logging.basicConfig(level=logging.INFO, format='%(message)s')
logger = logging.getLogger(__name__)

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


def complex_vectors(n: int):
    return st.tuples(arrays(np.float64, n, elements=finite), arrays(np.float64, n, elements=finite)).map(
        lambda parts: parts[0] + 1j * parts[1]
    )


def test_make_krein_from_signature():
    logger.info("\n[TEST 1] Krein space from a signature\n")
    K = make_krein((2, 1))
    assert K.dim == 3
    assert K.signature == (2, 1)
    assert K.pontryagin_index == 1
    assert K.is_canonical
    np.testing.assert_array_equal(K.J, np.diag([1.0, 1.0, -1.0]))
    np.testing.assert_allclose(K.P_plus + K.P_minus, np.eye(3))
    logger.info("✓ canonical symmetry diag(1, 1, -1)")


def test_make_krein_from_matrix_counts_signature():
    # reflection across a line: eigenvalues +1 and -1
    c, s = np.cos(0.3), np.sin(0.3)
    J = np.array([[c, s], [s, -c]])
    K = make_krein(J)
    assert K.signature == (1, 1)
    assert not K.is_canonical


def test_make_krein_rejects_bad_input():
    logger.info("\n[TEST 2] Invalid fundamental symmetries\n")
    with pytest.raises(EmptySpace):
        make_krein((0, 0))
    with pytest.raises(NotHermitian):
        make_krein(np.array([[1.0, 1.0], [0.0, -1.0]]))
    with pytest.raises(NotInvolutive, match="2"):
        make_krein(np.diag([1.0, 2.0]))
    with pytest.raises(EmptySpace):
        make_krein(np.zeros((0, 0)))
    logger.info("✓ EmptySpace, NotHermitian and NotInvolutive raised")


def test_indefinite_inner_values():
    K = make_krein((1, 1))
    e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert indefinite_square(e1, K) == 1.0
    assert indefinite_square(e2, K) == -1.0
    assert indefinite_square(e1 + e2, K) == 0.0
    assert indefinite_inner(e1, 1j * e1, K) == pytest.approx(-1j)
    with pytest.raises(DimensionMismatch):
        indefinite_square(np.ones(3), K)


@settings(max_examples=50, deadline=None)
@given(complex_vectors(3))
def test_indefinite_square_is_real_and_bounded(u):
    K = make_krein((2, 1))
    value = indefinite_inner(u, u, K)
    assert abs(value.imag) <= 1e-12 * max(1.0, np.vdot(u, u).real)
    assert abs(value.real) <= np.vdot(u, u).real * (1 + 1e-12) + 1e-12


@settings(max_examples=50, deadline=None)
@given(complex_vectors(3), complex_vectors(3), arrays(np.float64, (3, 3), elements=finite))
def test_j_adjoint_moves_across_the_form(u, v, A):
    K = make_krein((1, 2))
    Lc = j_adjoint(A, K)
    lhs = indefinite_inner(A @ u, v, K)
    rhs = indefinite_inner(u, Lc @ v, K)
    scale = max(1.0, np.linalg.norm(A) * np.linalg.norm(u) * np.linalg.norm(v))
    assert abs(lhs - rhs) <= 1e-10 * scale


def test_classify_subspace_kinds():
    logger.info("\n[TEST 3] Sign classification\n")
    K = make_krein((1, 1))
    positive = Subspace.from_vectors(np.array([1.0, 0.0]))
    negative = Subspace.from_vectors(np.array([0.0, 1.0]))
    neutral = Subspace.from_vectors(np.array([1.0, 1.0]))
    whole = Subspace(basis=np.eye(2, dtype=complex))

    cls = classify_subspace(positive, K)
    assert cls.kind == SignKind.UNIFORMLY_POSITIVE and cls.definiteness_constant == pytest.approx(1.0)
    cls = classify_subspace(negative, K)
    assert cls.kind == SignKind.UNIFORMLY_NEGATIVE and cls.definiteness_constant == pytest.approx(1.0)
    cls = classify_subspace(neutral, K)
    assert cls.kind == SignKind.NEUTRAL and cls.degenerate
    assert classify_subspace(whole, K).kind == SignKind.INDEFINITE
    empty = classify_subspace(Subspace.zero(2), K)
    assert empty.kind == SignKind.NEUTRAL and not empty.degenerate
    logger.info("✓ uniformly positive, uniformly negative, neutral, indefinite, empty")


def test_classify_nonnegative_degenerate():
    K = make_krein((2, 1))
    # span{e1, e2 + e3}: Gram diag(1, 0)
    M = Subspace.from_vectors(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]]))
    cls = classify_subspace(M, K)
    assert cls.kind == SignKind.NONNEGATIVE
    assert cls.degenerate
    assert cls.definiteness_constant == 0.0


def test_non_orthonormal_basis_rejected():
    K = make_krein((1, 1))
    with pytest.raises(NonOrthonormalBasis):
        indefinite_gram(Subspace(basis=np.array([[2.0], [0.0]], dtype=complex)), K)


def test_maximality():
    logger.info("\n[TEST 4] Maximal semidefinite subspaces\n")
    K = make_krein((2, 1))
    e = np.eye(3)
    assert is_maximal_semidefinite(Subspace.from_vectors(e[:, :2]), K).is_maximal
    assert not is_maximal_semidefinite(Subspace.from_vectors(e[:, :1]), K).is_maximal
    assert is_maximal_semidefinite(Subspace.from_vectors(e[:, 2]), K).is_maximal
    with pytest.raises(NotSemidefinite):
        is_maximal_semidefinite(Subspace.from_vectors(e[:, [0, 2]]), K)
    logger.info("✓ dimension p (q) decides maximality")


def test_j_orthogonal_complement():
    K = make_krein((1, 1))
    M = Subspace.from_vectors(np.array([1.0, 0.5]))
    perp = j_orthogonal_complement(M, K)
    assert perp.dim == 1
    assert abs(indefinite_inner(perp.basis[:, 0], M.basis[:, 0], K)) < 1e-12
    assert j_orthogonal_complement(Subspace.zero(2), K).dim == 2


@settings(max_examples=40, deadline=None)
@given(complex_vectors(2), complex_vectors(2))
def test_cauchy_bunyakovskii_on_positive_subspace(a, b):
    K = make_krein((2, 1))
    V = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], dtype=complex)
    M = Subspace(basis=V)
    u, v = V @ a, V @ b
    scale = max(1.0, np.vdot(u, u).real * np.vdot(v, v).real)
    assert cauchy_bunyakovskii_gap(M, K, u, v) >= -1e-10 * scale


def test_subspace_contains():
    M = Subspace.from_vectors(np.array([1.0, 1.0]))
    assert M.contains(np.array([2.0, 2.0]))
    assert not M.contains(np.array([1.0, 0.0]))


def test_compress_restricts_invariant_subspace():
    L = np.array([[2.0, 1.0], [0.0, 3.0]])
    M = Subspace.from_vectors(np.array([1.0, 0.0]))
    np.testing.assert_allclose(compress(L, M), [[2.0]])
    np.testing.assert_allclose(L @ M.basis, M.basis @ compress(L, M))


def test_sign_kinds_are_the_finite_dimensional_ones():
    assert {k.value for k in SignKind} == {
        "nonnegative", "uniformly_positive", "nonpositive", "uniformly_negative", "neutral", "indefinite",
    }
