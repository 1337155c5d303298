"""
Linear algebra helpers shared by every numerical module.
Hermitian/skew parts, PSD matrix powers and smallest singular values.
"""

import logging
from typing import Iterable

import numpy as np
import scipy.linalg as sla

from src.utils.config import config
from src.utils.errors import DimensionMismatch, NotPositiveDefinite

logger = logging.getLogger(__name__)

# Eigenvalues below this fraction of the largest one are clipped in psd_power
PSD_CLIP_REL = 1e-14


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return a as a complex 2-D square array, raising DimensionMismatch otherwise."""
    arr = np.atleast_2d(np.asarray(a, dtype=complex))
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    return arr


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def skew_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a - a.conj().T)


def spectral_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def psd_power(g: np.ndarray, power: float) -> np.ndarray:
    """
    Power of a Hermitian positive (semi)definite matrix via eigendecomposition.

    Eigenvalues are clipped at PSD_CLIP_REL * lambda_max before raising to the power.

    Args:
        g: Hermitian matrix
        power: Real exponent (negative powers need g positive definite)

    Returns:
        Hermitian matrix g**power
    """
    g = hermitian_part(g)
    if g.size == 0:
        return g.copy()
    w, v = np.linalg.eigh(g)
    top = max(float(w[-1]), 0.0)
    if top <= 0.0:
        raise NotPositiveDefinite("Gram matrix has no positive eigenvalue")
    w = np.clip(w, PSD_CLIP_REL * top, None)
    return hermitian_part((v * w ** power) @ v.conj().T)


def require_positive_definite(g: np.ndarray, name: str = "Gram") -> np.ndarray:
    """Check g is Hermitian positive definite and return its Hermitian part."""
    g = hermitian_part(np.asarray(g, dtype=complex))
    if g.size == 0:
        return g
    lam_min = float(np.linalg.eigvalsh(g)[0])
    if lam_min <= 0.0:
        raise NotPositiveDefinite(f"{name} is not positive definite (lambda_min={lam_min:.3e})")
    return g


def generalized_extremes(a: np.ndarray, b: np.ndarray) -> tuple:
    """Smallest and largest eigenvalue of the Hermitian pencil (a, b), b positive definite."""
    w = sla.eigh(hermitian_part(a), hermitian_part(b), eigvals_only=True)
    return float(w[0]), float(w[-1])


def _sigma_min_inverse_iteration(a: np.ndarray, iterations: int = 30) -> float:
    """Smallest singular value through inverse iteration on a^* a with one LU factorization."""
    try:
        lu, piv = sla.lu_factor(a)
    except (ValueError, sla.LinAlgError):
        return 0.0
    if np.any(np.abs(np.diag(lu)) == 0.0):
        return 0.0
    x = np.ones(a.shape[0], dtype=complex) / np.sqrt(a.shape[0])
    estimate = np.inf
    for _ in range(iterations):
        # (a^* a)^{-1} x = a^{-1} a^{-*} x
        y = sla.lu_solve((lu, piv), x, trans=2)
        z = sla.lu_solve((lu, piv), y)
        norm_z = np.linalg.norm(z)
        if not np.isfinite(norm_z) or norm_z == 0.0:
            return 0.0
        new_estimate = 1.0 / np.sqrt(norm_z)
        x = z / norm_z
        if abs(new_estimate - estimate) <= 1e-12 * new_estimate:
            estimate = new_estimate
            break
        estimate = new_estimate
    return float(estimate)


def sigma_min(a: np.ndarray) -> float:
    """Smallest singular value: full SVD below the dense limit, inverse iteration above."""
    if a.shape[0] == 0:
        return np.inf
    if a.shape[0] <= config.SVD_DENSE_LIMIT:
        return float(np.linalg.svd(a, compute_uv=False)[-1])
    return _sigma_min_inverse_iteration(a)


def sigma_min_shifted(a: np.ndarray, shifts: Iterable[complex], chunk: int = 64) -> np.ndarray:
    """
    sigma_min(a - z I) for every z in shifts.

    Batched SVD in chunks below the dense limit; per-shift inverse iteration above.
    """
    shifts = np.asarray(list(shifts), dtype=complex)
    n = a.shape[0]
    out = np.empty(shifts.shape[0], dtype=float)
    if n == 0:
        out.fill(np.inf)
        return out
    if n > config.SVD_DENSE_LIMIT:
        eye = np.eye(n)
        for k, z in enumerate(shifts):
            out[k] = _sigma_min_inverse_iteration(a - z * eye)
        return out
    eye = np.eye(n, dtype=complex)
    for start in range(0, shifts.shape[0], chunk):
        block = shifts[start:start + chunk]
        stack = a[None, :, :] - block[:, None, None] * eye[None, :, :]
        out[start:start + block.shape[0]] = np.linalg.svd(stack, compute_uv=False)[:, -1]
    return out


def resolvent_norms(a: np.ndarray, shifts: Iterable[complex], gram: np.ndarray = None) -> np.ndarray:
    """
    Norm of (a - z)^{-1} for every z in shifts.

    With gram given, the norm is taken in the metric x -> sqrt(x^* gram x).
    """
    if gram is None:
        sig = sigma_min_shifted(a, shifts)
        with np.errstate(divide="ignore"):
            return np.where(sig > 0.0, 1.0 / sig, np.inf)
    root = psd_power(gram, 0.5)
    root_inv = psd_power(gram, -0.5)
    return resolvent_norms(root @ a @ root_inv, shifts)


def orthonormal_columns(a: np.ndarray, rank: int = None) -> np.ndarray:
    """Orthonormal basis of the column space, optionally truncated to a known rank."""
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    if rank is None:
        return sla.orth(a)
    u, _, _ = np.linalg.svd(a, full_matrices=False)
    return u[:, :rank]


def relative_residual(a: np.ndarray, scale: float) -> float:
    return spectral_norm(a) / max(scale, 1.0)
