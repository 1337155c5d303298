"""
Interpolation identities - equivalence constants between interpolated and target norms.
Covers the (1/2, 2) identities of the Sobolev tower and F-scale, norm independence and reiteration.
"""

import logging
from typing import Tuple

import numpy as np

from src.dissipativity.classifier import OperatorSpec, f_grams
from src.interpolation.couples import (
    HilbertCouple,
    InterpolationResult,
    geometric_mean,
    sobolev_tower_gram,
    weighted_mean,
)
from src.utils.config import config
from src.utils.errors import LambdaInSpectrum
from src.utils.linalg import generalized_extremes, hermitian_part, require_positive_definite, sigma_min, spectral_norm

logger = logging.getLogger(__name__)


def equivalence_constants(gram: np.ndarray, target: np.ndarray) -> Tuple[float, float]:
    """Best (lower, upper) with lower ||u||_target <= ||u||_gram <= upper ||u||_target."""
    lo, hi = generalized_extremes(gram, target)
    return float(np.sqrt(max(lo, 0.0))), float(np.sqrt(hi))


def check_identity(c: HilbertCouple, target_gram: np.ndarray, label: str = "target") -> InterpolationResult:
    """
    Compare the (1/2, 2) norm of a couple with a target norm.

    The (pi/2)^{1/2} factor of the closed form is divided out, so an exact identity
    reports lower = upper = 1.

    Args:
        c: Hilbert couple
        target_gram: Hermitian positive-definite Gram of the target norm
        label: Name of the target for reports

    Returns:
        InterpolationResult with the mean Gram and the two-sided constants
    """
    target = require_positive_definite(target_gram, "target")
    mean = geometric_mean(c.G0, c.G1)
    lower, upper = equivalence_constants(mean, target)
    logger.debug(f"check_identity({label}): constants ({lower:.6g}, {upper:.6g})")
    return InterpolationResult(mean_gram=mean, equivalence_lower=lower, equivalence_upper=upper, target_label=label)


def norm_independence(op: OperatorSpec, lam1: complex, lam2: complex, k: int) -> Tuple[float, float]:
    """Constants between the H_k norms built at lam1 and lam2 (norm at lam2 over norm at lam1)."""
    g1 = sobolev_tower_gram(op, lam1, k)
    g2 = sobolev_tower_gram(op, lam2, k)
    if k == 0:
        return 1.0, 1.0
    return equivalence_constants(g2, g1)


def reiteration_constants(op: OperatorSpec, lam: complex, theta: float) -> InterpolationResult:
    """
    Compare (H1, H)_{theta,2} with (H1, H-1)_{theta/2,2}.

    Both Grams are taken without their pi / (2 sin pi theta) factors; for normal L the
    constants are (1, 1).
    """
    h1 = sobolev_tower_gram(op, lam, 1)
    hm1 = sobolev_tower_gram(op, lam, -1)
    eye = np.eye(op.dim, dtype=complex)
    upper_scale = weighted_mean(h1, eye, theta)
    lower_scale = weighted_mean(h1, hm1, theta / 2.0)
    lower, upper = equivalence_constants(upper_scale, lower_scale)
    return InterpolationResult(
        mean_gram=upper_scale, equivalence_lower=lower, equivalence_upper=upper,
        target_label=f"(H1,H-1)_{theta / 2:g},2",
    )


def shifted_negative_norm_constants(op: OperatorSpec) -> Tuple[float, float]:
    """
    Constants between ||(L - J)^{-1} u|| and the H-1 norm ||L^{-1} u||.

    L - J is invertible whenever L is J-dissipative, since Herm(J(L - J)) <= -I.
    """
    if sigma_min(op.L) <= config.TOL_SPECTRUM_REL * max(op.norm, 1.0):
        raise LambdaInSpectrum(f"0 lies in the spectrum of {op.label}; H-1 at lambda = 0 is undefined")
    shifted = np.linalg.inv(op.L - op.J)
    g_shifted = hermitian_part(shifted.conj().T @ shifted)
    return equivalence_constants(g_shifted, sobolev_tower_gram(op, 0.0, -1))


def shifted_form_identity_check(op: OperatorSpec) -> float:
    """Residual of -Re[(L - J)u, u] = ||u||^2_F1 as a matrix identity, relative to ||M1||."""
    form = -hermitian_part(op.J @ (op.L - op.J))
    M1 = f_grams(op).M1
    return spectral_norm(form - M1) / max(spectral_norm(M1), 1.0)


def f_scale_identity(op: OperatorSpec) -> InterpolationResult:
    """(F1, F-1)_{1/2,2} against H; exact at matrix scale."""
    g = f_grams(op)
    return check_identity(HilbertCouple(G0=g.M1, G1=g.Mm1), np.eye(op.dim), label="H")


def tower_identity(op: OperatorSpec, lam: complex = 0.0) -> InterpolationResult:
    """(H1, H-1)_{1/2,2} against H."""
    couple = HilbertCouple(G0=sobolev_tower_gram(op, lam, 1), G1=sobolev_tower_gram(op, lam, -1))
    return check_identity(couple, np.eye(op.dim), label="H")
