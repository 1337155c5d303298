"""
Krein space model - fundamental symmetry, signature and indefinite product.
Implements make_krein, indefinite_inner and j_adjoint.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from src.utils.config import config
from src.utils.errors import DimensionMismatch, EmptySpace, NotHermitian, NotInvolutive
from src.utils.linalg import as_complex_matrix, hermitian_part

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class KreinSpace:
    """Finite-dimensional Krein space (C^n, [x, y] = (Jx, y))."""

    J: np.ndarray
    signature: Tuple[int, int]

    @property
    def dim(self) -> int:
        return self.J.shape[0]

    @property
    def pontryagin_index(self) -> int:
        return min(self.signature)

    @property
    def P_plus(self) -> np.ndarray:
        """Orthogonal projection onto H+ = range((I + J)/2)."""
        return 0.5 * (np.eye(self.dim) + self.J)

    @property
    def P_minus(self) -> np.ndarray:
        """Orthogonal projection onto H- = range((I - J)/2)."""
        return 0.5 * (np.eye(self.dim) - self.J)

    @property
    def is_canonical(self) -> bool:
        """True when J = diag(I_p, -I_q) exactly."""
        p, q = self.signature
        canonical = np.diag(np.concatenate([np.ones(p), -np.ones(q)]))
        return bool(np.array_equal(self.J, canonical))

    def check_vector(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=complex).reshape(-1)
        if u.shape[0] != self.dim:
            raise DimensionMismatch(f"vector of length {u.shape[0]} in a space of dimension {self.dim}")
        return u

    def check_operator(self, L: np.ndarray) -> np.ndarray:
        L = as_complex_matrix(L, "operator")
        if L.shape[0] != self.dim:
            raise DimensionMismatch(f"operator of size {L.shape[0]} in a space of dimension {self.dim}")
        return L


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def canonical_symmetry(p: int, q: int) -> np.ndarray:
    return np.diag(np.concatenate([np.ones(p), -np.ones(q)])).astype(complex)


def make_krein(j_input: Union[Sequence[int], np.ndarray], tol: float = None) -> KreinSpace:
    """
    Build a Krein space from a signature pair or an explicit fundamental symmetry.

    Args:
        j_input: (p, q) pair, or a Hermitian involutive matrix J
        tol: Tolerance for the Hermitian and involution checks (default 1e-10 * n)

    Returns:
        KreinSpace with signature counted from the eigenvalue signs of J
    """
    if isinstance(j_input, (tuple, list)) and len(j_input) == 2 and all(
        isinstance(x, (int, np.integer)) for x in j_input
    ):
        p, q = int(j_input[0]), int(j_input[1])
        if p < 0 or q < 0:
            raise EmptySpace(f"signature entries must be nonnegative, got ({p}, {q})")
        if p + q == 0:
            raise EmptySpace("Krein space of dimension 0")
        return KreinSpace(J=_frozen(canonical_symmetry(p, q)), signature=(p, q))

    J = np.asarray(j_input, dtype=complex)
    if J.size == 0:
        raise EmptySpace("Krein space of dimension 0")
    J = as_complex_matrix(J, "J")
    n = J.shape[0]
    tol_herm = config.tol_structural(n, "herm") if tol is None else tol
    tol = config.tol_structural(n, "inv") if tol is None else tol

    herm_defect = float(np.linalg.norm(J - J.conj().T, 2))
    if herm_defect > tol_herm:
        raise NotHermitian(f"J is not Hermitian: ||J - J^*|| = {herm_defect:.3e} > {tol_herm:.1e}")

    J = hermitian_part(J)
    eigenvalues = np.linalg.eigvalsh(J)
    offending = eigenvalues[np.abs(np.abs(eigenvalues) - 1.0) > tol]
    inv_defect = float(np.linalg.norm(J @ J - np.eye(n), 2))
    if inv_defect > tol or offending.size:
        worst = offending[0] if offending.size else eigenvalues[np.argmax(np.abs(np.abs(eigenvalues) - 1.0))]
        raise NotInvolutive(
            f"J is not involutive: ||J^2 - I|| = {inv_defect:.3e}, offending eigenvalue {worst:.6g}"
        )

    p = int(np.sum(eigenvalues > 0))
    space = KreinSpace(J=_frozen(J), signature=(p, n - p))
    logger.debug(f"Krein space of dimension {n}, signature {space.signature}")
    return space


def indefinite_inner(u: np.ndarray, v: np.ndarray, K: KreinSpace) -> complex:
    """[u, v] = (Ju, v), conjugate-linear in v."""
    u = K.check_vector(u)
    v = K.check_vector(v)
    return complex(np.vdot(v, K.J @ u))


def indefinite_square(u: np.ndarray, K: KreinSpace) -> float:
    """[u, u], which is always real."""
    return float(indefinite_inner(u, u, K).real)


def j_adjoint(L: np.ndarray, K: KreinSpace) -> np.ndarray:
    """J-adjoint L^c = J L^* J, so that [Lu, v] = [u, L^c v]."""
    L = K.check_operator(L)
    return K.J @ L.conj().T @ K.J
