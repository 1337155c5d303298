"""
Hilbert couples - Gram pairs, operator means and Sobolev-tower Grams.
Implements geometric_mean, weighted_mean and sobolev_tower_gram.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.dissipativity.classifier import OperatorSpec
from src.utils.config import config
from src.utils.errors import LambdaInSpectrum, NotPositiveDefinite
from src.utils.linalg import hermitian_part, psd_power, require_positive_definite, sigma_min

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HilbertCouple:
    """Two Hermitian positive-definite Grams over the same coordinate space."""

    G0: np.ndarray
    G1: np.ndarray

    def __post_init__(self):
        g0 = require_positive_definite(self.G0, "G0")
        g1 = require_positive_definite(self.G1, "G1")
        if g0.shape != g1.shape:
            raise NotPositiveDefinite(f"Gram shapes differ: {g0.shape} vs {g1.shape}")
        object.__setattr__(self, "G0", g0)
        object.__setattr__(self, "G1", g1)

    @property
    def dim(self) -> int:
        return self.G0.shape[0]

    def relative_spectrum(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Eigen-data of B = G0^{-1/2} G1 G0^{-1/2}.

        Returns:
            (beta, Q, G0^{1/2}) with B = Q diag(beta) Q^*
        """
        root = psd_power(self.G0, 0.5)
        root_inv = psd_power(self.G0, -0.5)
        beta, Q = np.linalg.eigh(hermitian_part(root_inv @ self.G1 @ root_inv))
        return beta, Q, root

    def coordinates(self, a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(beta, |z|^2) with z the coefficients of G0^{1/2} a in the eigenbasis of B."""
        beta, Q, root = self.relative_spectrum()
        z = Q.conj().T @ (root @ np.asarray(a, dtype=complex).reshape(-1))
        return beta, np.abs(z) ** 2


@dataclass(frozen=True, eq=False)
class InterpolationResult:
    mean_gram: np.ndarray
    equivalence_lower: float
    equivalence_upper: float
    target_label: str

    def to_dict(self) -> dict:
        return {
            "target_label": self.target_label,
            "equivalence_lower": self.equivalence_lower,
            "equivalence_upper": self.equivalence_upper,
        }


def weighted_mean(G0: np.ndarray, G1: np.ndarray, theta: float) -> np.ndarray:
    """G0 #_theta G1 = G0^{1/2} (G0^{-1/2} G1 G0^{-1/2})^theta G0^{1/2}."""
    G0 = require_positive_definite(G0, "G0")
    G1 = require_positive_definite(G1, "G1")
    root = psd_power(G0, 0.5)
    root_inv = psd_power(G0, -0.5)
    inner = psd_power(root_inv @ G1 @ root_inv, theta)
    return hermitian_part(root @ inner @ root)


def geometric_mean(G0: np.ndarray, G1: np.ndarray) -> np.ndarray:
    """Operator geometric mean G0 # G1, the Gram of the (1/2, 2) space up to pi/2."""
    return weighted_mean(G0, G1, 0.5)


def sobolev_tower_gram(op: OperatorSpec, lam: complex, k: int) -> np.ndarray:
    """
    Gram of H_k with norm ||(L - lam)^k u||.

    Args:
        op: Operator generating the tower
        lam: Point of the resolvent set
        k: Integer index (negative k uses powers of the resolvent)

    Returns:
        Hermitian positive-definite Gram matrix
    """
    n = op.dim
    if k == 0:
        return np.eye(n, dtype=complex)
    A = op.L - lam * np.eye(n)
    if sigma_min(A) <= config.TOL_SPECTRUM_REL * max(op.norm, 1.0):
        raise LambdaInSpectrum(f"lambda = {lam} lies in the spectrum of {op.label}")
    base = A if k > 0 else np.linalg.inv(A)
    power = np.linalg.matrix_power(base, abs(k))
    return hermitian_part(power.conj().T @ power)


def tower_couple(op: OperatorSpec, lam: complex = 0.0, k: int = 1) -> HilbertCouple:
    """The couple (H_k, H_-k)."""
    return HilbertCouple(G0=sobolev_tower_gram(op, lam, k), G1=sobolev_tower_gram(op, lam, -k))
