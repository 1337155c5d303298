"""
Phase 3 Test - Interpolation of Hilbert couples
K-functionals, (theta, 2) norms, operator means and the identities built on them.
"""

import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.interpolation import (
    HilbertCouple,
    check_identity,
    f_scale_identity,
    geometric_mean,
    interp_half_norm,
    interp_theta_norm,
    k_exact,
    k_quadratic,
    norm_independence,
    reiteration_constants,
    shifted_form_identity_check,
    shifted_negative_norm_constants,
    sobolev_tower_gram,
    tower_couple,
    tower_identity,
    weighted_mean,
)
from src.utils.errors import InvalidParams, LambdaInSpectrum, NonPositiveT, NotPositiveDefinite

logging.basicConfig(level=logging.INFO, format='%(message)s')
logger = logging.getLogger(__name__)

entries = st.floats(min_value=-2, max_value=2, allow_nan=False, allow_infinity=False)


def spd(n: int):
    """Well-conditioned Hermitian positive-definite matrices B B^T + I."""
    return arrays(np.float64, (n, n), elements=entries).map(lambda b: b @ b.T + np.eye(n))


def scalar_couple(g0: float, g1: float) -> HilbertCouple:
    return HilbertCouple(G0=np.array([[g0]]), G1=np.array([[g1]]))


def test_k_quadratic_closed_form():
    logger.info("\n[TEST 1] Quadratic K-functional\n")
    c = scalar_couple(1.0, 4.0)
    assert k_quadratic(c, np.array([1.0]), 1.0) ** 2 == pytest.approx(4.0 / 5.0)
    with pytest.raises(NonPositiveT):
        k_quadratic(c, np.array([1.0]), 0.0)
    logger.info("✓ K2(1, 1)^2 = 4/5")


@pytest.mark.parametrize("t", [0.05, 0.3, 0.5, 1.0, 4.0])
def test_k_exact_scalar(t):
    c = scalar_couple(1.0, 4.0)
    assert k_exact(c, np.array([1.0]), t) == pytest.approx(min(1.0, 2.0 * t), rel=1e-8)


def test_k_exact_zero_vector_and_bad_t():
    c = scalar_couple(1.0, 4.0)
    assert k_exact(c, np.array([0.0]), 1.0) == 0.0
    with pytest.raises(NonPositiveT):
        k_exact(c, np.array([1.0]), -1.0)


@settings(max_examples=25, deadline=None)
@given(spd(2), spd(2), st.floats(min_value=0.05, max_value=20.0))
def test_k_exact_between_quadratic_bounds(g0, g1, t):
    c = HilbertCouple(G0=g0, G1=g1)
    a = np.array([1.0, -0.5])
    k2 = k_quadratic(c, a, t)
    k = k_exact(c, a, t)
    # K2 <= K <= sqrt(2) K2
    assert k2 <= k * (1 + 1e-8) + 1e-12
    assert k <= np.sqrt(2.0) * k2 * (1 + 1e-8) + 1e-12


def test_half_norm_closed_form_and_quadrature():
    logger.info("\n[TEST 2] (1/2, 2) norm\n")
    c = HilbertCouple(G0=np.eye(2), G1=np.eye(2))
    closed, quadrature = interp_half_norm(c, np.array([1.0, 1.0]))
    assert closed ** 2 == pytest.approx(np.pi)
    assert quadrature == pytest.approx(closed, rel=1e-6)
    logger.info(f"✓ closed {closed:.10f}, quadrature {quadrature:.10f}")


@settings(max_examples=15, deadline=None)
@given(spd(2), spd(2))
def test_half_norm_quadrature_matches_closed_form(g0, g1):
    c = HilbertCouple(G0=g0, G1=g1)
    closed, quadrature = interp_half_norm(c, np.array([0.7, 1.3]))
    assert quadrature == pytest.approx(closed, rel=1e-6)


def random_couple(seed: int) -> tuple:
    """Couple of size n <= 8 whose relative spectrum spans roughly 1e-2 .. 1e5."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    G0 = A @ A.conj().T + 0.1 * np.eye(n)
    G1 = 10.0 ** rng.uniform(0.0, 4.0) * (B @ B.conj().T + 0.1 * np.eye(n))
    a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return HilbertCouple(G0=G0, G1=G1), a


def test_half_norm_with_large_relative_spectrum():
    c = scalar_couple(1.0, 1e4)
    closed, quadrature = interp_half_norm(c, np.array([1.0]))
    # closed^2 = pi/2 * (1 * 1e4)^(1/2)
    assert closed ** 2 == pytest.approx(50.0 * np.pi)
    assert abs(quadrature - closed) <= 1e-6 * closed


@pytest.mark.parametrize("seed", range(50))
def test_half_norm_on_random_couples(seed):
    c, a = random_couple(seed)
    closed, quadrature = interp_half_norm(c, a)
    assert closed > 0.0
    assert abs(quadrature - closed) <= 1e-6 * closed


def test_theta_norm_rejects_bad_theta():
    c = scalar_couple(1.0, 2.0)
    with pytest.raises(InvalidParams):
        interp_theta_norm(c, np.array([1.0]), 1.0)


def test_couple_requires_positive_definite_grams():
    with pytest.raises(NotPositiveDefinite):
        HilbertCouple(G0=np.array([[1.0, 0.0], [0.0, -1.0]]), G1=np.eye(2))


@settings(max_examples=30, deadline=None)
@given(spd(3), spd(3))
def test_geometric_mean_properties(a, b):
    m = geometric_mean(a, b)
    scale = max(1.0, np.linalg.norm(a), np.linalg.norm(b))
    # symmetric in its arguments
    np.testing.assert_allclose(m, geometric_mean(b, a), atol=1e-8 * scale ** 2)
    # M A^{-1} M = B
    np.testing.assert_allclose(m @ np.linalg.solve(a, m), b, atol=1e-7 * scale ** 3)


def test_weighted_mean_endpoints():
    a = np.diag([1.0, 4.0])
    b = np.diag([9.0, 1.0])
    np.testing.assert_allclose(weighted_mean(a, b, 0.0), a, atol=1e-12)
    np.testing.assert_allclose(weighted_mean(a, b, 1.0), b, atol=1e-12)
    np.testing.assert_allclose(weighted_mean(a, b, 0.5), np.diag([3.0, 2.0]), atol=1e-12)


def test_sobolev_tower(diag_op):
    logger.info("\n[TEST 3] Sobolev tower\n")
    np.testing.assert_allclose(sobolev_tower_gram(diag_op, 0.0, 0), np.eye(2))
    np.testing.assert_allclose(sobolev_tower_gram(diag_op, 0.0, 2), np.eye(2), atol=1e-14)
    np.testing.assert_allclose(sobolev_tower_gram(diag_op, 1j, -1), 0.5 * np.eye(2), atol=1e-14)
    with pytest.raises(LambdaInSpectrum):
        sobolev_tower_gram(diag_op, -1.0, 1)
    assert tower_couple(diag_op).dim == 2
    logger.info("✓ H_k Grams of diag(-1, 1)")


def test_norm_independence(diag_op):
    lower, upper = norm_independence(diag_op, 0.0, 2j, 1)
    assert lower == pytest.approx(np.sqrt(5.0))
    assert upper == pytest.approx(np.sqrt(5.0))
    assert norm_independence(diag_op, 0.0, 2j, 0) == (1.0, 1.0)


def test_f_scale_identity_is_exact(coupled_op):
    logger.info("\n[TEST 4] Interpolation identities\n")
    result = f_scale_identity(coupled_op)
    assert result.equivalence_lower == pytest.approx(1.0, abs=1e-10)
    assert result.equivalence_upper == pytest.approx(1.0, abs=1e-10)
    assert result.to_dict()["target_label"] == "H"


def test_tower_identity_normal_and_non_normal(diag_op, coupled_op):
    exact = tower_identity(diag_op)
    assert exact.equivalence_lower == pytest.approx(1.0)
    assert exact.equivalence_upper == pytest.approx(1.0)
    skewed = tower_identity(coupled_op)
    assert 0.0 < skewed.equivalence_lower <= 1.0 + 1e-12
    assert skewed.equivalence_upper >= 1.0 - 1e-12


def test_check_identity_against_scaled_target():
    c = HilbertCouple(G0=np.eye(2), G1=np.eye(2))
    result = check_identity(c, 4.0 * np.eye(2), label="4I")
    assert result.equivalence_lower == pytest.approx(0.5)
    assert result.equivalence_upper == pytest.approx(0.5)


def test_reiteration_normal_operator(diag_op):
    result = reiteration_constants(diag_op, 0.5j, 0.5)
    assert result.equivalence_lower == pytest.approx(1.0)
    assert result.equivalence_upper == pytest.approx(1.0)


def test_shifted_identities(coupled_op, diag_op):
    assert shifted_form_identity_check(coupled_op) < 1e-14
    lower, upper = shifted_negative_norm_constants(coupled_op)
    assert 0.0 < lower <= upper < np.inf
    # diag(-1, 1): (L - J)^{-1} = diag(-1/2, 1/2) and L^{-1} is unitary
    lower, upper = shifted_negative_norm_constants(diag_op)
    assert lower == pytest.approx(0.5) and upper == pytest.approx(0.5)
