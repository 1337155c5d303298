"""
Block form of L in the H+ x H- decomposition and the checks built on it.
Covers block_split, the isomorphism check against the diagonal part and the subordination constants.
"""

import logging
from typing import NamedTuple

import numpy as np

from src.dissipativity.classifier import OperatorSpec, f_grams
from src.interpolation.identities import equivalence_constants
from src.krein.space import KreinSpace
from src.utils.config import config
from src.utils.errors import BlocksNotDissipative, LambdaInSpectrum, MuInSpectrum
from src.utils.linalg import generalized_extremes, hermitian_part, psd_power, sigma_min, spectral_norm

logger = logging.getLogger(__name__)


class BlockForm(NamedTuple):
    A11: np.ndarray
    A12: np.ndarray
    A21: np.ndarray
    A22: np.ndarray


def canonical_basis(space: KreinSpace) -> np.ndarray:
    """
    Unitary U with U^* J U = diag(I_p, -I_q).

    A permutation when J is diagonal, an eigenbasis of J otherwise.
    """
    J = space.J
    n = space.dim
    if np.allclose(J, np.diag(np.diag(J)), rtol=0.0, atol=0.0):
        order = np.argsort(-np.diag(J).real, kind="stable")
        return np.eye(n, dtype=complex)[:, order]
    w, U = np.linalg.eigh(J)
    return U[:, np.argsort(-w, kind="stable")]


def block_split(op: OperatorSpec) -> BlockForm:
    """A11 = P+ L P+, A12 = P+ L P-, A21 = P- L P+, A22 = P- L P- in canonical coordinates."""
    p, _ = op.space.signature
    U = canonical_basis(op.space)
    Lc = U.conj().T @ op.L @ U
    return BlockForm(A11=Lc[:p, :p], A12=Lc[:p, p:], A21=Lc[p:, :p], A22=Lc[p:, p:])


def reassemble(blocks: BlockForm, space: KreinSpace) -> np.ndarray:
    """Inverse of block_split."""
    U = canonical_basis(space)
    Lc = np.block([[blocks.A11, blocks.A12], [blocks.A21, blocks.A22]])
    return U @ Lc @ U.conj().T


def diagonal_part(op: OperatorSpec) -> np.ndarray:
    """L0 = diag(A11, A22) in the original coordinates."""
    b = block_split(op)
    zeros = BlockForm(b.A11, np.zeros_like(b.A12), np.zeros_like(b.A21), b.A22)
    return reassemble(zeros, op.space)


def _off_axis(a: np.ndarray, tol: float) -> bool:
    if a.size == 0:
        return True
    return bool(np.all(np.abs(np.linalg.eigvals(a).real) > tol))


def _is_dissipative(a: np.ndarray, tol: float) -> bool:
    if a.size == 0:
        return True
    return float(np.linalg.eigvalsh(hermitian_part(a))[-1]) <= tol


def theorem_3_7_check(op: OperatorSpec, lam: complex, mu: complex) -> dict:
    """
    Compare L with its block diagonal part L0 = diag(A11, A22).

    Args:
        op: Operator in block form
        lam: Point of rho(L)
        mu: Point of rho(L0)

    Returns:
        Record with iR_ok_L, iR_ok_L0, domain_match, iso_condition_number (condition number
        of T = (L - lam)^{-1}(L0 - mu)), A11_dissipative, minus_A22_dissipative and the
        constants between ||(L - lam)^{-1} u|| and ||(L0 - mu)^{-1} u||
    """
    L = np.asarray(op.L)
    L0 = diagonal_part(op)
    eye = np.eye(op.dim)
    tol = config.TOL_SPECTRUM_REL * max(op.norm, 1.0)
    if sigma_min(L - lam * eye) <= tol:
        raise LambdaInSpectrum(f"lambda = {lam} lies in the spectrum of {op.label}")
    if sigma_min(L0 - mu * eye) <= tol:
        raise MuInSpectrum(f"mu = {mu} lies in the spectrum of the diagonal part of {op.label}")

    R = np.linalg.inv(L - lam * eye)
    R0 = np.linalg.inv(L0 - mu * eye)
    T = R @ (L0 - mu * eye)
    kappa = float(np.linalg.cond(T))
    lower, upper = equivalence_constants(hermitian_part(R0.conj().T @ R0), hermitian_part(R.conj().T @ R))
    b = block_split(op)
    record = {
        "iR_ok_L": _off_axis(L, tol),
        "iR_ok_L0": _off_axis(L0, tol),
        "domain_match": True,
        "iso_condition_number": kappa,
        "A11_dissipative": _is_dissipative(b.A11, tol),
        "minus_A22_dissipative": _is_dissipative(-b.A22, tol),
        "resolvent_lower": lower,
        "resolvent_upper": upper,
    }
    logger.debug(f"theorem_3_7_check({op.label}): kappa(T) = {kappa:.6g}")
    return record


def theorem_3_8_constants(op: OperatorSpec) -> dict:
    """
    Subordination constants of the off-diagonal blocks.

    With M+ = I - Herm(A11) and M- = I + Herm(A22):
    c_A12 = ||M+^{-1/2} A12 M-^{-1/2}||, c_A21 = ||M-^{-1/2} A21 M+^{-1/2}||, and c0 is the
    best constant in u^* diag(M+, M-) u <= c0 u^* (I - Herm(JL)) u. c_diag is the reverse
    constant, u^* (I - Herm(JL)) u <= c_diag u^* diag(M+, M-) u.
    """
    b = block_split(op)
    tol = config.TOL_DISSIPATIVE * max(op.dim, 1) * max(op.norm, 1.0)
    if not _is_dissipative(b.A11, tol) or not _is_dissipative(-b.A22, tol):
        raise BlocksNotDissipative(f"A11 and -A22 of {op.label} must both be dissipative")

    p, q = b.A11.shape[0], b.A22.shape[0]
    m_plus = np.eye(p) - hermitian_part(b.A11)
    m_minus = np.eye(q) + hermitian_part(b.A22)
    r_plus = psd_power(m_plus, -0.5) if p else m_plus
    r_minus = psd_power(m_minus, -0.5) if q else m_minus
    c_a12 = spectral_norm(r_plus @ b.A12 @ r_minus) if p and q else 0.0
    c_a21 = spectral_norm(r_minus @ b.A21 @ r_plus) if p and q else 0.0

    U = canonical_basis(op.space)
    M1 = U.conj().T @ f_grams(op).M1 @ U
    D = np.zeros_like(M1)
    D[:p, :p] = m_plus
    D[p:, p:] = m_minus
    _, c0 = generalized_extremes(D, M1)
    _, c_diag = generalized_extremes(M1, D)
    logger.debug(f"theorem_3_8_constants({op.label}): c_A12={c_a12:.6g}, c_A21={c_a21:.6g}, c0={c0:.6g}")
    return {"c_A12": c_a12, "c_A21": c_a21, "c0": c0, "c_diag": c_diag}
