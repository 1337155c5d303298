"""
Subspaces of a Krein space - sign classification and maximality.
Subspaces are stored through Hilbert-orthonormal bases; the Gram V^*JV carries the sign.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from src.krein.space import KreinSpace
from src.utils.config import config
from src.utils.errors import DimensionMismatch, NonOrthonormalBasis, NotSemidefinite
from src.utils.linalg import hermitian_part, orthonormal_columns

logger = logging.getLogger(__name__)


class SignKind(str, Enum):
    """Sign behaviour of the indefinite form on a subspace."""
    NONNEGATIVE = "nonnegative"
    UNIFORMLY_POSITIVE = "uniformly_positive"
    NONPOSITIVE = "nonpositive"
    UNIFORMLY_NEGATIVE = "uniformly_negative"
    NEUTRAL = "neutral"
    INDEFINITE = "indefinite"


_NONNEGATIVE_KINDS = {
    SignKind.NONNEGATIVE, SignKind.UNIFORMLY_POSITIVE, SignKind.NEUTRAL,
}
_NONPOSITIVE_KINDS = {
    SignKind.NONPOSITIVE, SignKind.UNIFORMLY_NEGATIVE, SignKind.NEUTRAL,
}


@dataclass(frozen=True)
class SignClass:
    kind: SignKind
    definiteness_constant: float
    degenerate: bool

    @property
    def is_nonnegative(self) -> bool:
        return self.kind in _NONNEGATIVE_KINDS

    @property
    def is_nonpositive(self) -> bool:
        return self.kind in _NONPOSITIVE_KINDS

    @property
    def is_uniform(self) -> bool:
        return self.kind in (SignKind.UNIFORMLY_POSITIVE, SignKind.UNIFORMLY_NEGATIVE)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace spanned by the orthonormal columns of basis (n x k)."""

    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def projector(self) -> np.ndarray:
        """Hilbert-orthogonal projection onto the subspace."""
        return self.basis @ self.basis.conj().T

    @classmethod
    def from_vectors(cls, vectors: np.ndarray, rank: int = None) -> "Subspace":
        """Orthonormalize the columns of vectors (n x m) into a basis."""
        vectors = np.asarray(vectors, dtype=complex)
        if vectors.ndim == 1:
            vectors = vectors.reshape(-1, 1)
        return cls(basis=orthonormal_columns(vectors, rank))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(basis=np.zeros((n, 0), dtype=complex))

    def contains(self, u: np.ndarray, tol: float = 1e-10) -> bool:
        u = np.asarray(u, dtype=complex).reshape(-1)
        scale = max(float(np.linalg.norm(u)), 1e-300)
        return float(np.linalg.norm(u - self.projector @ u)) <= tol * scale


def _check_basis(M: Subspace, K: KreinSpace, tol_orth: float = None) -> np.ndarray:
    V = np.asarray(M.basis, dtype=complex)
    if V.ndim != 2 or V.shape[0] != K.dim:
        raise DimensionMismatch(f"basis with {V.shape[0]} rows in a space of dimension {K.dim}")
    if V.shape[1] > K.dim:
        raise DimensionMismatch(f"subspace dimension {V.shape[1]} exceeds {K.dim}")
    tol_orth = config.tol_structural(K.dim, "orth") if tol_orth is None else tol_orth
    if V.shape[1]:
        defect = float(np.linalg.norm(V.conj().T @ V - np.eye(V.shape[1]), 2))
        if defect > tol_orth:
            raise NonOrthonormalBasis(f"V^*V deviates from I by {defect:.3e}")
    return V


def indefinite_gram(M: Subspace, K: KreinSpace) -> np.ndarray:
    """G = V^*JV."""
    V = _check_basis(M, K)
    return hermitian_part(V.conj().T @ K.J @ V)


def classify_subspace(M: Subspace, K: KreinSpace, tol: float = None) -> SignClass:
    """
    Classify the indefinite form on M from the spectrum of G = V^*JV.

    Args:
        M: Subspace with Hilbert-orthonormal basis
        K: Ambient Krein space
        tol: Zero threshold for Gram eigenvalues (default 1e-8 * max(||G||, 1))

    Returns:
        SignClass; for uniform kinds the constant is the distance of the spectrum from 0
    """
    G = indefinite_gram(M, K)
    if G.shape[0] == 0:
        return SignClass(kind=SignKind.NEUTRAL, definiteness_constant=0.0, degenerate=False)

    w = np.linalg.eigvalsh(G)
    if tol is None:
        tol = config.TOL_CLASSIFY_REL * max(float(np.max(np.abs(w))), 1.0)
    lam_min, lam_max = float(w[0]), float(w[-1])

    if np.all(np.abs(w) <= tol):
        return SignClass(kind=SignKind.NEUTRAL, definiteness_constant=0.0, degenerate=True)
    if lam_min > tol:
        return SignClass(kind=SignKind.UNIFORMLY_POSITIVE, definiteness_constant=lam_min, degenerate=False)
    if lam_max < -tol:
        return SignClass(kind=SignKind.UNIFORMLY_NEGATIVE, definiteness_constant=-lam_max, degenerate=False)
    if lam_min >= -tol:
        return SignClass(kind=SignKind.NONNEGATIVE, definiteness_constant=0.0, degenerate=True)
    if lam_max <= tol:
        return SignClass(kind=SignKind.NONPOSITIVE, definiteness_constant=0.0, degenerate=True)
    return SignClass(kind=SignKind.INDEFINITE, definiteness_constant=0.0, degenerate=False)


class MaximalityVerdict(NamedTuple):
    is_maximal: bool
    reason: str


def is_maximal_semidefinite(M: Subspace, K: KreinSpace, tol: float = None) -> MaximalityVerdict:
    """A nonnegative (nonpositive) subspace is maximal iff its dimension is p (q)."""
    sign = classify_subspace(M, K, tol)
    if sign.kind == SignKind.INDEFINITE:
        raise NotSemidefinite("subspace is indefinite; maximality is undefined")
    p, q = K.signature
    k = M.dim
    if sign.is_nonnegative and k == p:
        return MaximalityVerdict(True, f"nonnegative with dim {k} = p")
    if sign.is_nonpositive and k == q:
        return MaximalityVerdict(True, f"nonpositive with dim {k} = q")
    side = "nonnegative" if sign.is_nonnegative else "nonpositive"
    target = p if sign.is_nonnegative else q
    return MaximalityVerdict(False, f"{side} with dim {k}, maximal dimension is {target}")


def j_orthogonal_complement(M: Subspace, K: KreinSpace) -> Subspace:
    """M^[perp] = {x : [x, m] = 0 for m in M} = (JM)^perp."""
    V = _check_basis(M, K)
    if V.shape[1] == 0:
        return Subspace(basis=np.eye(K.dim, dtype=complex))
    return Subspace(basis=sla.null_space((K.J @ V).conj().T))


def compress(L: np.ndarray, M: Subspace) -> np.ndarray:
    """V^*LV; equals the restriction of L in the basis V when M is invariant."""
    V = M.basis
    return V.conj().T @ L @ V


def cauchy_bunyakovskii_gap(M: Subspace, K: KreinSpace, u: np.ndarray, v: np.ndarray) -> float:
    """[u,u][v,v] - |[u,v]|^2, nonnegative on semidefinite subspaces."""
    uu = float(np.vdot(u, K.J @ u).real)
    vv = float(np.vdot(v, K.J @ v).real)
    uv = np.vdot(v, K.J @ u)
    return uu * vv - abs(uv) ** 2
