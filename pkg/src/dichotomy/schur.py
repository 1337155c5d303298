"""
Ordered-Schur dichotomy - spectral projections onto the stable and antistable parts of L.
Also holds DichotomyResult, shared with the contour construction.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np
import scipy.linalg as sla

from src.dissipativity.classifier import OperatorSpec
from src.krein.subspace import SignClass, Subspace, classify_subspace, compress
from src.utils.config import config
from src.utils.errors import ImaginarySpectrum, SylvesterIllConditioned
from src.utils.linalg import orthonormal_columns, spectral_norm

logger = logging.getLogger(__name__)

# Sylvester solutions above this norm are treated as ill-conditioned
SYLVESTER_NORM_LIMIT = 1e8


class DichotomyMethod(str, Enum):
    CONTOUR = "contour"
    SCHUR = "schur"


@dataclass(eq=False)
class DichotomyResult:
    """Projection pair, invariant subspaces and their restriction spectra."""

    P_plus: np.ndarray
    P_minus: np.ndarray
    M_plus: Subspace
    M_minus: Subspace
    spectrum_plus: np.ndarray
    spectrum_minus: np.ndarray
    sign_class_plus: SignClass
    sign_class_minus: SignClass
    method: DichotomyMethod
    residuals: Dict[str, float] = field(default_factory=dict)
    bounds: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "dim_plus": self.M_plus.dim,
            "dim_minus": self.M_minus.dim,
            "spectrum_plus": [[float(z.real), float(z.imag)] for z in self.spectrum_plus],
            "spectrum_minus": [[float(z.real), float(z.imag)] for z in self.spectrum_minus],
            "sign_class_plus": self.sign_class_plus.kind.value,
            "sign_class_minus": self.sign_class_minus.kind.value,
            "delta_plus": self.sign_class_plus.definiteness_constant,
            "delta_minus": self.sign_class_minus.definiteness_constant,
            "residuals": dict(self.residuals),
            "bounds": dict(self.bounds),
        }


def axis_tolerance(op: OperatorSpec) -> float:
    return config.TOL_SPECTRUM_REL * max(op.norm, 1.0)


def require_off_axis(op: OperatorSpec, tol: float = None) -> np.ndarray:
    """Eigenvalues of L, raising ImaginarySpectrum if any lies within tol of iR."""
    tol = axis_tolerance(op) if tol is None else tol
    eigenvalues = np.linalg.eigvals(op.L)
    close = eigenvalues[np.abs(eigenvalues.real) <= tol]
    if close.size:
        raise ImaginarySpectrum(
            f"{op.label} has {close.size} eigenvalue(s) within {tol:.1e} of the imaginary axis, "
            f"e.g. {close[0]:.6g}; deflate with riesz_deflate first"
        )
    return eigenvalues


def projection_residuals(L: np.ndarray, P_plus: np.ndarray, P_minus: np.ndarray,
                         M_plus: Subspace, M_minus: Subspace) -> Dict[str, float]:
    """Raw residuals of the projection algebra and of the invariance of M^+-."""
    n = L.shape[0]
    eye = np.eye(n)

    def invariance(M: Subspace) -> float:
        if M.dim == 0:
            return 0.0
        V = M.basis
        return spectral_norm(L @ V - V @ (V.conj().T @ L @ V))

    return {
        "idempotency": max(spectral_norm(P_plus @ P_plus - P_plus), spectral_norm(P_minus @ P_minus - P_minus)),
        "completeness": spectral_norm(P_plus + P_minus - eye),
        "commutation": max(spectral_norm(L @ P_plus - P_plus @ L), spectral_norm(L @ P_minus - P_minus @ L)),
        "invariance": max(invariance(M_plus), invariance(M_minus)),
        "cross": spectral_norm(P_plus @ P_minus),
    }


def assemble_result(
    op: OperatorSpec,
    P_plus: np.ndarray,
    P_minus: np.ndarray,
    method: DichotomyMethod,
    M_plus: Optional[Subspace] = None,
    M_minus: Optional[Subspace] = None,
    bounds: Optional[Dict[str, float]] = None,
) -> DichotomyResult:
    """
    Complete a DichotomyResult from a projection pair.

    Subspaces default to the orthonormalized ranges of the projections, with ranks
    read off the (integer) traces.
    """
    if M_plus is None:
        rank = int(round(np.trace(P_plus).real))
        M_plus = Subspace(basis=orthonormal_columns(P_plus, rank))
    if M_minus is None:
        rank = int(round(np.trace(P_minus).real))
        M_minus = Subspace(basis=orthonormal_columns(P_minus, rank))

    spectrum_plus = np.linalg.eigvals(compress(op.L, M_plus)) if M_plus.dim else np.zeros(0, dtype=complex)
    spectrum_minus = np.linalg.eigvals(compress(op.L, M_minus)) if M_minus.dim else np.zeros(0, dtype=complex)
    return DichotomyResult(
        P_plus=P_plus,
        P_minus=P_minus,
        M_plus=M_plus,
        M_minus=M_minus,
        spectrum_plus=np.sort_complex(spectrum_plus),
        spectrum_minus=np.sort_complex(spectrum_minus),
        sign_class_plus=classify_subspace(M_plus, op.space),
        sign_class_minus=classify_subspace(M_minus, op.space),
        method=method,
        residuals=projection_residuals(op.L, P_plus, P_minus, M_plus, M_minus),
        bounds=dict(bounds or {}),
    )


def _sylvester_projection(T: np.ndarray, k: int) -> Optional[np.ndarray]:
    """[[I, Y], [0, 0]] with T11 Y - Y T22 = T12, or None when Y is unusable."""
    n = T.shape[0]
    if k in (0, n):
        return np.eye(n, dtype=complex) if k == n else np.zeros((n, n), dtype=complex)
    T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
    try:
        Y = sla.solve_sylvester(T11, -T22, T12)
    except (sla.LinAlgError, ValueError) as e:
        logger.warning(f"✗ Sylvester decoupling failed: {e}")
        return None
    if not np.all(np.isfinite(Y)) or spectral_norm(Y) > SYLVESTER_NORM_LIMIT:
        logger.warning(f"✗ Sylvester solution norm {spectral_norm(Y):.3e} exceeds {SYLVESTER_NORM_LIMIT:.0e}")
        return None
    P = np.zeros((n, n), dtype=complex)
    P[:k, :k] = np.eye(k)
    P[:k, k:] = Y
    return P


def schur_dichotomy(op: OperatorSpec, tol: float = None) -> DichotomyResult:
    """
    Spectral dichotomy from an ordered complex Schur form.

    The leading Schur block collects Re(mu) < 0, so M_plus carries the spectrum in the
    open left half-plane. Projections come from the decoupling Sylvester equation; when
    it is ill-conditioned they are assembled from the full Schur similarity instead.

    Args:
        op: Operator with no eigenvalue on the imaginary axis
        tol: Axis tolerance (default 1e-8 * max(||L||, 1))

    Returns:
        DichotomyResult with method "schur"
    """
    require_off_axis(op, tol)
    L = np.asarray(op.L)
    n = op.dim

    T, Z, k = sla.schur(L, output="complex", sort="lhp")
    _, Z_rhp, k_rhp = sla.schur(L, output="complex", sort="rhp")
    M_plus = Subspace(basis=Z[:, :k])
    M_minus = Subspace(basis=Z_rhp[:, :k_rhp])

    P_schur = _sylvester_projection(T, k)
    if P_schur is not None:
        P_plus = Z @ P_schur @ Z.conj().T
    else:
        S = np.hstack([M_plus.basis, M_minus.basis])
        cond = np.linalg.cond(S)
        if not np.isfinite(cond) or cond > 1.0 / np.finfo(float).eps:
            raise SylvesterIllConditioned(f"Schur similarity of {op.label} is singular (cond = {cond:.3e})")
        logger.warning(f"Falling back to the explicit Schur similarity (cond = {cond:.3e})")
        D = np.diag(np.concatenate([np.ones(k), np.zeros(n - k)]))
        P_plus = S @ D @ np.linalg.inv(S)

    P_minus = np.eye(n) - P_plus
    result = assemble_result(op, P_plus, P_minus, DichotomyMethod.SCHUR, M_plus, M_minus)

    scale = config.TOL_VERIFY * max(op.norm, 1.0) * max(spectral_norm(P_plus), 1.0)
    worst = max(result.residuals["idempotency"], result.residuals["commutation"])
    if worst > scale:
        raise SylvesterIllConditioned(
            f"projection residual {worst:.3e} of {op.label} exceeds {scale:.1e}"
        )
    logger.debug(f"✓ schur_dichotomy({op.label}): dim M+ = {k}, dim M- = {k_rhp}")
    return result
