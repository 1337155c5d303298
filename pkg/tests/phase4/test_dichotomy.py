"""
Phase 4 Test - Spectral dichotomy
Schur and contour projections, Riesz deflation, verification certificates and block checks.
"""

import logging
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.dichotomy import (
    DichotomyMethod,
    SectorContour,
    assemble_result,
    block_split,
    contour_nodes,
    contour_projections,
    default_contour,
    diagonal_part,
    half_plane_resolvent_scan,
    j_selfadjoint_projection_check,
    reassemble,
    restricted_identity_check,
    riesz_deflate,
    ray_edges,
    riesz_projector,
    schur_dichotomy,
    theorem_3_7_check,
    theorem_3_8_constants,
    verify_theorem_3_2,
)
from src.dissipativity import generate
from src.krein import SignKind
from src.reporting import AnalysisOptions, analyze
from src.utils.config import config
from src.utils.errors import (
    BlocksNotDissipative,
    ClusterTooClose,
    ContourHitsSpectrum,
    DegenerateComplement,
    ImaginarySpectrum,
    InvalidParams,
    QuadratureBudgetExceeded,
    SpectrumInHalfPlane,
)
from tests.conftest import operator

logging.basicConfig(level=logging.INFO, format='%(message)s')
logger = logging.getLogger(__name__)

# The laptop target is 50 ms per instance; shared CI runners get headroom
CORPUS_MEDIAN_SECONDS = 0.5


def _direction(M) -> np.ndarray:
    v = M.basis[:, 0]
    return v / v[np.argmax(np.abs(v))]


def test_schur_dichotomy_coupled(coupled_op):
    logger.info("\n[TEST 1] Schur dichotomy of the coupled pair\n")
    d = schur_dichotomy(coupled_op)
    assert d.method == DichotomyMethod.SCHUR
    assert d.M_plus.dim == 1 and d.M_minus.dim == 1
    np.testing.assert_allclose(d.spectrum_plus, [-0.8], atol=1e-12)
    np.testing.assert_allclose(d.spectrum_minus, [0.8], atol=1e-12)
    np.testing.assert_allclose(_direction(d.M_plus), [1.0, 1.0 / 3.0], atol=1e-12)
    assert d.sign_class_plus.kind == SignKind.UNIFORMLY_POSITIVE
    assert d.sign_class_plus.definiteness_constant == pytest.approx(0.8)
    assert d.sign_class_minus.kind == SignKind.UNIFORMLY_NEGATIVE
    assert d.sign_class_minus.definiteness_constant == pytest.approx(0.8)
    assert max(d.residuals.values()) < 1e-12
    logger.info("✓ M+ = span(3, 1), delta+ = delta- = 0.8")


def test_contour_matches_schur(coupled_op):
    logger.info("\n[TEST 2] Contour projections\n")
    schur = schur_dichotomy(coupled_op)
    contour = contour_projections(coupled_op)
    assert contour.method == DichotomyMethod.CONTOUR
    assert np.linalg.norm(contour.P_plus - schur.P_plus, 2) < 1e-8
    assert np.linalg.norm(contour.P_minus - schur.P_minus, 2) < 1e-8
    assert contour.bounds["quadrature_error"] <= 1e-8
    assert contour.bounds["residue_mismatch"] < 1e-8
    logger.info(f"✓ ||P_contour - P_schur|| = {np.linalg.norm(contour.P_plus - schur.P_plus, 2):.2e}")


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_contour_matches_schur_on_uniform_family(seed):
    op = generate("uniform", signature=(2, 2), seed=seed, delta=0.5)
    schur = schur_dichotomy(op)
    contour = contour_projections(op)
    scale = max(1.0, np.linalg.norm(schur.P_plus, 2))
    assert np.linalg.norm(contour.P_plus - schur.P_plus, 2) <= 1e-6 * scale
    assert schur.M_plus.dim == 2 and schur.M_minus.dim == 2


def test_jordan_block_dichotomy(jordan_op):
    d = schur_dichotomy(jordan_op)
    assert d.M_plus.dim == 2 and d.M_minus.dim == 0
    np.testing.assert_allclose(d.P_plus, np.eye(2), atol=1e-12)
    contour = contour_projections(jordan_op)
    np.testing.assert_allclose(contour.P_plus, np.eye(2), atol=1e-7)


def test_imaginary_spectrum_rejected(axis_op):
    with pytest.raises(ImaginarySpectrum):
        schur_dichotomy(axis_op)
    with pytest.raises(ImaginarySpectrum):
        contour_projections(axis_op)


def test_contour_parameters():
    logger.info("\n[TEST 3] Contour geometry\n")
    with pytest.raises(InvalidParams):
        SectorContour(half_angle_delta=0.0, inner_radius=0.1, truncation_radius=10.0)
    with pytest.raises(InvalidParams):
        SectorContour(half_angle_delta=0.3, inner_radius=2.0, truncation_radius=1.0)
    c = SectorContour(half_angle_delta=np.pi / 4, inner_radius=0.1, truncation_radius=10.0)
    z, w, inner = contour_nodes(c, 8)
    # the origin lies outside the closed contour
    assert abs(np.sum(w)) < 1e-12
    np.testing.assert_allclose(np.abs(z[inner]), 0.1)
    logger.info("✓ closed contour, inner arc at r = 0.1")


def test_contour_touching_spectrum(diag_op):
    touching = SectorContour(half_angle_delta=np.pi / 4, inner_radius=1.0, truncation_radius=10.0)
    with pytest.raises(ContourHitsSpectrum):
        contour_projections(diag_op, touching)
    too_small = SectorContour(half_angle_delta=np.pi / 4, inner_radius=0.1, truncation_radius=0.5)
    with pytest.raises(InvalidParams):
        contour_projections(diag_op, too_small)


def test_default_contour_encloses_spectrum(coupled_op):
    c = default_contour(coupled_op)
    assert c.inner_radius < 0.8 < c.truncation_radius
    assert 0.0 < c.half_angle_delta <= np.pi / 4


def test_riesz_deflation(axis_op):
    logger.info("\n[TEST 4] Riesz deflation\n")
    deflation = riesz_deflate(axis_op)
    reduced = deflation.operator
    assert reduced.dim == 1
    assert reduced.space.signature == (0, 1)
    np.testing.assert_allclose(reduced.L, [[1.0]], atol=1e-12)
    assert np.trace(deflation.projector).real == pytest.approx(1.0)
    assert reduced.metadata["removed_eigenvalues"] == [[0.0, 1.0]]
    # L W = W L'
    W = deflation.embedding
    np.testing.assert_allclose(axis_op.L @ W, W @ reduced.L, atol=1e-12)
    logger.info("✓ eigenvalue i removed, complement is the negative line")


def test_riesz_deflation_edge_cases(coupled_op):
    untouched = riesz_deflate(coupled_op)
    assert untouched.operator is coupled_op
    with pytest.raises(ClusterTooClose):
        riesz_deflate(operator([[1e-15j, 0.0], [0.0, -1e-15j]]))
    with pytest.raises(DegenerateComplement):
        riesz_deflate(operator([[1j, 0.0], [0.0, 2j]]))


def test_riesz_projector_is_spectral():
    L = np.diag([1j, 3.0])
    P = riesz_projector(L, 1j, 1.0)
    np.testing.assert_allclose(P, np.diag([1.0, 0.0]), atol=1e-12)


def test_verification_certificate(coupled_op):
    logger.info("\n[TEST 5] Verification certificate\n")
    cert = verify_theorem_3_2(coupled_op, schur_dichotomy(coupled_op))
    assert cert.passed
    names = [c.name for c in cert.clauses]
    for required in ("invariance", "semidefiniteness", "maximality", "spectral_inclusion",
                     "uniform_definiteness", "axis_resolvent_inherited", "inverse_commutation"):
        assert required in names
    assert cert.constants["delta_plus"] == pytest.approx(0.8)
    assert cert.to_dict()["passed"] is True
    logger.info(f"✓ {len(cert.clauses)} clauses passed")


def test_verification_rejects_swapped_subspaces(coupled_op):
    good = schur_dichotomy(coupled_op)
    swapped = assemble_result(coupled_op, good.P_minus, good.P_plus, DichotomyMethod.SCHUR)
    cert = verify_theorem_3_2(coupled_op, swapped)
    assert not cert.passed
    assert not cert.clause("spectral_inclusion").passed
    assert not cert.clause("semidefiniteness").passed


def test_verification_without_strictness(jordan_op):
    cert = verify_theorem_3_2(jordan_op, schur_dichotomy(jordan_op))
    assert cert.clause("maximality").passed
    assert cert.clause("invariance").passed


def test_half_plane_resolvent_scan(diag_op):
    d = schur_dichotomy(diag_op)
    scan = half_plane_resolvent_scan(diag_op, d.M_plus, "plus")
    assert scan.sup == pytest.approx(np.sqrt(2.0), rel=1e-6)
    minus = half_plane_resolvent_scan(diag_op, d.M_minus, "minus")
    assert minus.sup == pytest.approx(np.sqrt(2.0), rel=1e-6)
    with pytest.raises(SpectrumInHalfPlane):
        half_plane_resolvent_scan(diag_op, d.M_plus, "minus")


def test_restricted_identity_and_projection(coupled_op):
    d = schur_dichotomy(coupled_op)
    restricted = restricted_identity_check(coupled_op, d)
    for side in ("plus", "minus"):
        assert restricted[side].equivalence_lower == pytest.approx(1.0)
        assert restricted[side].equivalence_upper == pytest.approx(1.0)
    assert restricted["commutation"] < 1e-12
    record = j_selfadjoint_projection_check(coupled_op, d.M_plus)
    assert record["idempotency"] < 1e-12
    assert record["j_selfadjoint"] < 1e-12
    assert record["invariance"] < 1e-12


def test_block_split_round_trip(coupled_op):
    logger.info("\n[TEST 6] Block form\n")
    blocks = block_split(coupled_op)
    assert blocks.A11.shape == (1, 1) and blocks.A22.shape == (1, 1)
    np.testing.assert_allclose(reassemble(blocks, coupled_op.space), coupled_op.L)
    np.testing.assert_allclose(diagonal_part(coupled_op), np.diag([-1.0, 1.0]))


def test_block_constants_coupled(coupled_op):
    constants = theorem_3_8_constants(coupled_op)
    assert constants["c_A12"] == pytest.approx(0.3)
    assert constants["c_A21"] == pytest.approx(0.3)
    assert constants["c0"] == pytest.approx(2.0 / 1.4)
    assert constants["c_diag"] == pytest.approx(1.3)
    logger.info("✓ c_A12 = c_A21 = 0.3")


@pytest.mark.parametrize("coupling", [0.0, 0.25, 0.7])
def test_block_constants_recover_planted_values(coupling):
    op = generate("block", signature=(2, 3), seed=11, coupling=coupling)
    constants = theorem_3_8_constants(op)
    planted = op.metadata["planted"]
    assert constants["c_A12"] == pytest.approx(planted["c_A12"], abs=1e-8)
    assert constants["c_A21"] == pytest.approx(planted["c_A21"], abs=1e-8)
    assert constants["c0"] == pytest.approx(planted["c0"], abs=1e-8)


def test_block_constants_need_dissipative_diagonal():
    with pytest.raises(BlocksNotDissipative):
        theorem_3_8_constants(operator([[1.0, 0.0], [0.0, 1.0]]))


def test_diagonal_comparison(coupled_op):
    record = theorem_3_7_check(coupled_op, 2.0, 2.0)
    assert record["iR_ok_L"] and record["iR_ok_L0"]
    assert record["A11_dissipative"] and record["minus_A22_dissipative"]
    assert 1.0 <= record["iso_condition_number"] < np.inf
    assert 0.0 < record["resolvent_lower"] <= record["resolvent_upper"]


# ============================================================================
# Near-axis deflation
# ============================================================================


def _j_unitary(signature=(2, 2), seed=5, t=0.3) -> np.ndarray:
    """Unitary mixing inside each sign block followed by a hyperbolic rotation of e1 and e3."""
    rng = np.random.default_rng(seed)
    p, q = signature
    V = np.zeros((p + q, p + q), dtype=complex)
    for lo, hi in ((0, p), (p, p + q)):
        Q, _ = np.linalg.qr(rng.standard_normal((hi - lo, hi - lo)) + 1j * rng.standard_normal((hi - lo, hi - lo)))
        V[lo:hi, lo:hi] = Q
    H = np.eye(p + q, dtype=complex)
    H[np.ix_([1, p + 1], [1, p + 1])] = [[np.cosh(t), np.sinh(t)], [np.sinh(t), np.cosh(t)]]
    return V @ H


def planted_jordan_at_zero(change_basis: bool = True):
    """
    Nilpotent J-dissipative block [[-1, -1], [1, 1]] on (e0, e2) plus diag(-1, 1) on (e1, e3).

    J = diag(1, 1, -1, -1); JL = -[[1, 1], [1, 1]] (+) diag(-1, -1) <= 0.
    """
    L0 = np.zeros((4, 4), dtype=complex)
    L0[np.ix_([0, 2], [0, 2])] = [[-1.0, -1.0], [1.0, 1.0]]
    L0[1, 1], L0[3, 3] = -1.0, 1.0
    if not change_basis:
        return operator(L0, signature=(2, 2), label="jordan-zero")
    V = _j_unitary()
    J = np.diag([1.0, 1.0, -1.0, -1.0])
    L = V @ L0 @ (J @ V.conj().T @ J)
    return operator(L, signature=(2, 2), label="jordan-zero-mixed")


def assert_dichotomy_holds(op) -> tuple:
    """Contour/Schur agreement, projection algebra, semidefiniteness, dimensions and spectral inclusion."""
    schur = schur_dichotomy(op)
    contour = contour_projections(op)
    L = np.asarray(op.L)
    scale = max(1.0, np.linalg.norm(L, 2))
    assert np.linalg.norm(contour.P_plus - schur.P_plus, 2) <= 1e-6

    P, Q = schur.P_plus, schur.P_minus
    assert np.linalg.norm(P @ P - P, 2) <= 1e-8 * scale
    assert np.linalg.norm(Q @ Q - Q, 2) <= 1e-8 * scale
    assert np.linalg.norm(P + Q - np.eye(op.dim), 2) <= 1e-8 * scale
    assert np.linalg.norm(L @ P - P @ L, 2) <= 1e-8 * scale
    assert np.linalg.norm(L @ Q - Q @ L, 2) <= 1e-8 * scale
    Linv = np.linalg.inv(L)
    inv_norm = np.linalg.norm(Linv, 2)
    assert np.linalg.norm(P @ Linv - Linv @ P, 2) <= 1e-8 * inv_norm
    assert np.linalg.norm(Q @ Linv - Linv @ Q, 2) <= 1e-8 * inv_norm

    p, q = op.space.signature
    assert (schur.M_plus.dim, schur.M_minus.dim) == (p, q)
    J = op.J
    if p:
        V = schur.M_plus.basis
        assert np.linalg.eigvalsh(V.conj().T @ J @ V)[0] >= -1e-8
        assert np.max(schur.spectrum_plus.real) < 0.0
    if q:
        V = schur.M_minus.basis
        assert np.linalg.eigvalsh(V.conj().T @ J @ V)[-1] <= 1e-8
        assert np.min(schur.spectrum_minus.real) > 0.0
    return schur, contour


def test_deflate_simple_zero_eigenvalue():
    logger.info("\n[TEST 7] Deflation of diag(0, -1, 1)\n")
    op = operator(np.diag([0.0, -1.0, 1.0]), signature=(2, 1), label="zero-diag")
    deflation = riesz_deflate(op)
    assert np.linalg.matrix_rank(deflation.projector, tol=1e-8) == 1
    np.testing.assert_allclose(deflation.projector, np.diag([1.0, 0.0, 0.0]), atol=1e-12)
    reduced = deflation.operator
    assert reduced.space.signature == (1, 1)
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(reduced.L).real), [-1.0, 1.0], atol=1e-12)
    assert_dichotomy_holds(reduced)

    report = analyze(op, AnalysisOptions(deflate=True))
    assert report.failed_stage is None
    assert report.deflation["projector_rank"] == 1
    assert report.passed
    logger.info("✓ span{e1} removed, complement diag(-1, 1)")


def test_deflate_jordan_block_at_zero():
    # [[0, 1], [0, 0]] (+) diag(-1, 1) with J = diag(1, 1, 1, -1)
    L = np.zeros((4, 4))
    L[0, 1] = 1.0
    L[2, 2], L[3, 3] = -1.0, 1.0
    op = operator(L, signature=(3, 1), label="jordan-block")
    deflation = riesz_deflate(op)
    assert np.linalg.matrix_rank(deflation.projector, tol=1e-8) == 2
    np.testing.assert_allclose(deflation.projector, np.diag([1.0, 1.0, 0.0, 0.0]), atol=1e-10)
    reduced = deflation.operator
    assert reduced.dim == 2 and reduced.space.signature == (1, 1)
    assert reduced.metadata["removed_eigenvalues"] == [[0.0, 0.0], [0.0, 0.0]]
    assert_dichotomy_holds(reduced)


def test_deflate_jordan_block_after_j_unitary_change_of_basis():
    logger.info("\n[TEST 8] Jordan block at 0 in a mixed basis\n")
    plain_basis = riesz_deflate(planted_jordan_at_zero(change_basis=False))
    np.testing.assert_allclose(plain_basis.projector, np.diag([1.0, 0.0, 1.0, 0.0]), atol=1e-6)
    op = planted_jordan_at_zero()
    deflation = riesz_deflate(op)
    assert np.linalg.matrix_rank(deflation.projector, tol=1e-6) == 2
    np.testing.assert_allclose(op.L @ deflation.projector @ op.L, 0.0, atol=1e-6)
    reduced = deflation.operator
    assert reduced.space.signature == (1, 1)
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(reduced.L).real), [-1.0, 1.0], atol=1e-8)
    W = deflation.embedding
    np.testing.assert_allclose(op.L @ W, W @ reduced.L, atol=1e-8)
    assert_dichotomy_holds(reduced)

    report = analyze(op, AnalysisOptions(deflate=True))
    assert report.failed_stage is None
    assert report.deflation["projector_rank"] == 2
    assert report.passed
    logger.info("✓ two-dimensional Riesz subspace removed, deflated pipeline passes")


def test_deflate_semisimple_double_eigenvalue():
    rng = np.random.default_rng(3)
    U, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    op = operator(U @ np.diag([0.0, 0.0, -1.0, -2.0]) @ U.conj().T, signature=(4, 0), label="double-zero")
    deflation = riesz_deflate(op)
    assert np.linalg.matrix_rank(deflation.projector, tol=1e-8) == 2
    assert deflation.operator.space.signature == (2, 0)
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(deflation.operator.L).real), [-2.0, -1.0], atol=1e-10)


def test_triangular_input_keeps_distinct_eigenvalues_apart():
    # exact diagonal entries +-1e-15 i are two eigenvalues, not one split double eigenvalue
    with pytest.raises(ClusterTooClose):
        riesz_deflate(operator(np.diag([1e-15j, -1e-15j, -1.0]), signature=(2, 1)))


# ============================================================================
# Contour node budget
# ============================================================================


def test_contour_near_axis_eigenvalue_stays_within_budget():
    logger.info("\n[TEST 9] Contour with a near-axis eigenvalue\n")
    op = operator(np.diag([-1e-5 + 1j, 1.0]), label="near-axis")
    contour = contour_projections(op)
    schur = schur_dichotomy(op)
    assert np.linalg.norm(contour.P_plus - schur.P_plus, 2) <= 1e-6
    assert contour.bounds["total_nodes"] < 50_000
    logger.info(f"✓ {int(contour.bounds['total_nodes'])} nodes")


def test_contour_budget_exceeded(coupled_op, monkeypatch):
    monkeypatch.setattr(config, "CONTOUR_MAX_TOTAL_NODES", 50)
    with pytest.raises(QuadratureBudgetExceeded):
        contour_projections(coupled_op)


def test_ray_panels_are_graded_towards_eigenvalue_moduli():
    c = SectorContour(half_angle_delta=1e-6, inner_radius=1e-3, truncation_radius=100.0, ray_breakpoints=(1.0,))
    edges = ray_edges(c)
    widths = np.diff(edges)
    assert edges[0] == pytest.approx(np.log(1e-3)) and edges[-1] == pytest.approx(np.log(100.0))
    assert widths[:-1].min() == pytest.approx(1e-6)
    assert widths.max() <= 1.0
    assert edges.size < 200


# ============================================================================
# Acceptance corpus
# ============================================================================


@pytest.fixture(scope="module")
def corpus_dichotomies(j_dissipative_corpus):
    records = []
    for op in j_dissipative_corpus:
        start = time.perf_counter()
        contour = contour_projections(op)
        elapsed = time.perf_counter() - start
        records.append((op, schur_dichotomy(op), contour, elapsed))
    return records


def test_corpus_contour_matches_schur(corpus_dichotomies):
    logger.info("\n[TEST 10] Contour vs Schur on the corpus\n")
    worst = max(np.linalg.norm(c.P_plus - s.P_plus, 2) for _, s, c, _ in corpus_dichotomies)
    assert worst <= 1e-6
    median = float(np.median([t for *_, t in corpus_dichotomies]))
    logger.info(f"✓ worst ||P_contour - P_schur|| = {worst:.2e}, median contour time {1e3 * median:.1f} ms")
    assert median < CORPUS_MEDIAN_SECONDS


def test_corpus_projection_algebra(corpus_dichotomies):
    for op, schur, _, _ in corpus_dichotomies:
        L = np.asarray(op.L)
        scale = max(1.0, np.linalg.norm(L, 2))
        for name in ("idempotency", "completeness", "commutation"):
            assert schur.residuals[name] <= 1e-8 * scale, (op.label, name)
        Linv = np.linalg.inv(L)
        bound = 1e-8 * np.linalg.norm(Linv, 2)
        for P in (schur.P_plus, schur.P_minus):
            assert np.linalg.norm(P @ Linv - Linv @ P, 2) <= bound, op.label


def test_corpus_semidefinite_maximal_subspaces(corpus_dichotomies):
    for op, schur, _, _ in corpus_dichotomies:
        p, q = op.space.signature
        assert (schur.M_plus.dim, schur.M_minus.dim) == (p, q), op.label
        if p:
            V = schur.M_plus.basis
            assert np.linalg.eigvalsh(V.conj().T @ op.J @ V)[0] >= -1e-8
            assert np.max(schur.spectrum_plus.real) < 0.0
        if q:
            V = schur.M_minus.basis
            assert np.linalg.eigvalsh(V.conj().T @ op.J @ V)[-1] <= 1e-8
            assert np.min(schur.spectrum_minus.real) > 0.0
