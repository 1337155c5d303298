"""
Dissipativity classifier - J-dissipativity flags, F1/F-1 Grams and best constants.
Implements classify, f_grams and the F-norm comparison constants c_2_4, c_2_5 and m_2_16.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.linalg as sla

from src.krein.space import KreinSpace, j_adjoint
from src.utils.config import config
from src.utils.errors import DimensionMismatch, NotJDissipative
from src.utils.linalg import (
    as_complex_matrix,
    hermitian_part,
    psd_power,
    sigma_min,
    skew_part,
    spectral_norm,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Complex square matrix L acting in a Krein space."""

    L: np.ndarray
    space: KreinSpace
    label: str = "operator"
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        L = as_complex_matrix(self.L, "L")
        if L.shape[0] != self.space.dim:
            raise DimensionMismatch(
                f"L is {L.shape[0]}x{L.shape[0]} but the Krein space has dimension {self.space.dim}"
            )
        L = np.array(L)
        L.setflags(write=False)
        object.__setattr__(self, "L", L)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def J(self) -> np.ndarray:
        return self.space.J

    @property
    def JL(self) -> np.ndarray:
        return self.space.J @ self.L

    @property
    def norm(self) -> float:
        return spectral_norm(self.L)

    def with_matrix(self, L: np.ndarray, label: Optional[str] = None) -> "OperatorSpec":
        return OperatorSpec(L=L, space=self.space, label=label or self.label, metadata=dict(self.metadata))


@dataclass(frozen=True, eq=False)
class FGrams:
    M1: np.ndarray
    Mm1: np.ndarray


@dataclass(frozen=True)
class DissipativityReport:
    """
    Flags and constants of a (J-)dissipative operator.

    Strict and uniform J-dissipativity coincide in finite dimension; both flags are set together.
    """

    is_dissipative: bool
    is_J_dissipative: bool
    is_strict: bool
    is_uniform: bool
    delta_uniform: float
    lambda_max_herm: float
    c_2_4: Optional[float] = None
    c_2_5: Optional[float] = None
    m_2_16: Optional[float] = None
    omega0: Optional[float] = None
    c_2_19: Optional[float] = None
    sector_angle: Optional[float] = None

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _default_tol(op: OperatorSpec) -> float:
    return config.TOL_DISSIPATIVE * max(op.dim, 1) * max(1.0, spectral_norm(op.JL))


def classify(op: OperatorSpec, tol: float = None) -> DissipativityReport:
    """
    Classify L through the spectrum of Herm(JL).

    is_dissipative refers to L in the Hilbert metric (Herm(L) <= 0); the J-flags
    refer to Herm(JL).
    """
    tol = _default_tol(op) if tol is None else tol
    lam_max = float(np.linalg.eigvalsh(hermitian_part(op.JL))[-1])
    lam_max_hilbert = float(np.linalg.eigvalsh(hermitian_part(op.L))[-1])
    is_j = lam_max <= tol
    strict = lam_max < -tol
    report = DissipativityReport(
        is_dissipative=lam_max_hilbert <= tol,
        is_J_dissipative=is_j,
        is_strict=strict,
        is_uniform=strict,
        delta_uniform=max(0.0, -lam_max),
        lambda_max_herm=lam_max,
    )
    logger.debug(f"classify({op.label}): lambda_max(Herm JL)={lam_max:.3e}, J-dissipative={is_j}")
    return report


def f_grams(op: OperatorSpec) -> FGrams:
    """M1 = I - Herm(JL) and its inverse."""
    M1 = np.eye(op.dim) - hermitian_part(op.JL)
    try:
        chol = sla.cholesky(M1, lower=True)
    except sla.LinAlgError as e:
        raise NotJDissipative(f"F1 Gram of {op.label} is not positive definite: {e}")
    if not classify(op).is_J_dissipative:
        logger.warning(f"{op.label} is not J-dissipative; F1 Gram is positive definite but not >= I")
    Mm1 = sla.cho_solve((chol, True), np.eye(op.dim, dtype=complex))
    return FGrams(M1=hermitian_part(M1), Mm1=hermitian_part(Mm1))


def _whitened(g: FGrams, a: np.ndarray) -> np.ndarray:
    r = psd_power(g.M1, -0.5)
    return r @ a @ r


def condition_2_4(op: OperatorSpec, g: FGrams) -> float:
    """Best c with |[Lu, v]| <= c ||u||_F1 ||v||_F1."""
    return spectral_norm(_whitened(g, op.JL))


def condition_2_5(op: OperatorSpec, g: FGrams) -> float:
    """Best c with |Im[Lu, u]| <= c ||u||^2_F1 (skew part of JL)."""
    return spectral_norm(_whitened(g, skew_part(op.JL)))


def condition_2_16(op: OperatorSpec, g: FGrams) -> float:
    """Best m with ||u||^2 <= m(-Re[Lu, u] + ||u||^2_F-1)."""
    form = g.M1 - np.eye(op.dim) + g.Mm1
    return 1.0 / float(np.linalg.eigvalsh(hermitian_part(form))[0])


def sector_angle(op: OperatorSpec, tol: float = 1e-12) -> float:
    """
    Half-angle of the smallest sector about the positive axis containing W(-JL).

    Returns pi when -JL is not accretive and 0 when -JL is Hermitian semidefinite.
    """
    B = -op.JL
    if spectral_norm(B) == 0.0:
        return 0.0

    def accretive(phi: float) -> bool:
        lo = np.linalg.eigvalsh(hermitian_part(np.exp(1j * phi) * B))[0]
        hi = np.linalg.eigvalsh(hermitian_part(np.exp(-1j * phi) * B))[0]
        return min(lo, hi) >= -tol * spectral_norm(B)

    if not accretive(0.0):
        return float(np.pi)
    lo, hi = 0.0, np.pi / 2
    if accretive(hi):
        # W(-JL) lies on the positive half-axis
        return 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if accretive(mid):
            lo = mid
        else:
            hi = mid
    return float(np.pi / 2 - lo)


def assess(op: OperatorSpec, scan=None) -> DissipativityReport:
    """classify plus every constant of the report; scan reuses an existing resolvent scan."""
    from src.dissipativity.resolvent import resolvent_scan

    report = classify(op)
    updates = {"sector_angle": sector_angle(op)}
    try:
        g = f_grams(op)
        updates.update(
            c_2_4=condition_2_4(op, g),
            c_2_5=condition_2_5(op, g),
            m_2_16=condition_2_16(op, g),
        )
    except NotJDissipative as e:
        logger.warning(f"✗ {e}")
    scan = resolvent_scan(op) if scan is None else scan
    updates.update(omega0=scan.omega0, c_2_19=scan.c_2_19)
    return replace(report, **updates)


# ============================================================================
# Hilbert-space predicates for dissipative operators
# ============================================================================


def open_right_half_plane_in_resolvent(op: OperatorSpec, samples: int = 64) -> bool:
    """For JL dissipative: every sampled lambda with Re lambda > 0 lies in rho(JL)."""
    A = op.JL
    scale = max(op.norm, 1.0)
    rng = np.random.default_rng(0)
    points = scale * (rng.random(samples) * 2.0 + 1e-3) + 1j * scale * rng.normal(size=samples)
    eye = np.eye(op.dim)
    return all(sigma_min(A - z * eye) >= z.real * (1 - 1e-10) for z in points)


def kernel_of_adjoint_trivial(op: OperatorSpec, tol: float = None) -> bool:
    """ker L = 0 implies ker L^c = 0."""
    tol = config.TOL_SPECTRUM_REL * max(op.norm, 1.0) if tol is None else tol
    ker_L = sigma_min(op.L) <= tol
    ker_Lc = sigma_min(j_adjoint(op.L, op.space)) <= tol
    return ker_L or not ker_Lc


def injective_iff_dense_range(op: OperatorSpec, tol: float = None) -> bool:
    """Injectivity and dense range agree (rank of L against rank of L^*)."""
    tol = config.TOL_SPECTRUM_REL * max(op.norm, 1.0) if tol is None else tol
    s = np.linalg.svd(op.L, compute_uv=False)
    injective = bool(s[-1] > tol)
    dense_range = bool(np.linalg.svd(op.L.conj().T, compute_uv=False)[-1] > tol)
    return injective == dense_range


def resolvent_identity_residual(L: np.ndarray, lam: complex, gamma: complex) -> float:
    """|| R(lam) - R(gamma) - (lam - gamma) R(lam) R(gamma) || relative to kappa(L-lam) kappa(L-gamma)."""
    eye = np.eye(L.shape[0])
    R_lam = np.linalg.inv(L - lam * eye)
    R_gam = np.linalg.inv(L - gamma * eye)
    residual = spectral_norm(R_lam - R_gam - (lam - gamma) * R_lam @ R_gam)
    scale = np.linalg.cond(L - lam * eye) * np.linalg.cond(L - gamma * eye)
    return residual / scale
