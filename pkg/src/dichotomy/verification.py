"""
Dichotomy verification - certificates for the invariant maximal semidefinite subspaces.
Failed predicates are reported as failed clauses, never raised.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from src.dichotomy.schur import DichotomyResult
from src.dissipativity.classifier import OperatorSpec, classify, f_grams
from src.dissipativity.resolvent import axis_grid
from src.interpolation.couples import HilbertCouple
from src.interpolation.identities import check_identity
from src.krein.subspace import Subspace, compress, indefinite_gram, is_maximal_semidefinite
from src.utils.config import config
from src.utils.errors import InvalidParams, KreinError, NotSemidefinite, SpectrumInHalfPlane
from src.utils.linalg import (
    generalized_extremes,
    hermitian_part,
    resolvent_norms,
    sigma_min,
    sigma_min_shifted,
    spectral_norm,
)

logger = logging.getLogger(__name__)


@dataclass
class ClauseResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass
class VerificationCertificate:
    """Clause-by-clause outcome of a verification run."""

    operator: str
    clauses: List[ClauseResult] = field(default_factory=list)
    constants: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause(self, name: str) -> ClauseResult:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "passed": self.passed,
            "clauses": [c.to_dict() for c in self.clauses],
            "constants": dict(self.constants),
        }


class DichotomyVerifier:
    """Checks the conclusions expected of M+ and M- for a J-dissipative operator."""

    def __init__(self, op: OperatorSpec, d: DichotomyResult, tol: float = None):
        self.op = op
        self.d = d
        self.tol = config.TOL_VERIFY if tol is None else tol
        self.scale = max(op.norm, 1.0)

    def _result(self, name: str, passed: bool, value: float, tolerance: float, detail: str = "") -> ClauseResult:
        marker = "✓" if passed else "✗"
        log = logger.info if passed else logger.warning
        log(f"{marker} {name}: value={value:.3e}, tolerance={tolerance:.1e} {detail}".rstrip())
        return ClauseResult(name=name, passed=bool(passed), value=float(value), tolerance=float(tolerance), detail=detail)

    def invariance(self) -> ClauseResult:
        """||(I - P) L P|| for both projections, relative to ||L|| ||P||^2."""
        L = np.asarray(self.op.L)
        eye = np.eye(self.op.dim)
        worst = 0.0
        for P in (self.d.P_plus, self.d.P_minus):
            norm_P = max(spectral_norm(P), 1.0)
            worst = max(worst, spectral_norm((eye - P) @ L @ P) / (self.scale * norm_P ** 2))
        return self._result("invariance", worst <= self.tol, worst, self.tol)

    def semidefiniteness(self) -> ClauseResult:
        """lambda_min(V+^* J V+) >= -tol and lambda_max(V-^* J V-) <= tol."""
        margins = []
        if self.d.M_plus.dim:
            margins.append(float(np.linalg.eigvalsh(indefinite_gram(self.d.M_plus, self.op.space))[0]))
        if self.d.M_minus.dim:
            margins.append(-float(np.linalg.eigvalsh(indefinite_gram(self.d.M_minus, self.op.space))[-1]))
        worst = min(margins) if margins else 0.0
        detail = f"M+ {self.d.sign_class_plus.kind.value}, M- {self.d.sign_class_minus.kind.value}"
        return self._result("semidefiniteness", worst >= -self.tol, worst, self.tol, detail)

    def maximality(self) -> ClauseResult:
        """dim M+ = p and dim M- = q with the right sign."""
        reasons = []
        ok = True
        for M in (self.d.M_plus, self.d.M_minus):
            try:
                verdict = is_maximal_semidefinite(M, self.op.space)
                ok = ok and verdict.is_maximal
                reasons.append(verdict.reason)
            except NotSemidefinite as e:
                ok = False
                reasons.append(str(e))
        p, q = self.op.space.signature
        defect = abs(self.d.M_plus.dim - p) + abs(self.d.M_minus.dim - q)
        return self._result("maximality", ok, float(defect), 0.0, "; ".join(reasons))

    def spectral_inclusion(self) -> ClauseResult:
        """max Re sigma(L|M+) < 0 < min Re sigma(L|M-)."""
        plus = float(np.max(self.d.spectrum_plus.real)) if self.d.spectrum_plus.size else -np.inf
        minus = float(np.min(self.d.spectrum_minus.real)) if self.d.spectrum_minus.size else np.inf
        margin = min(-plus, minus)
        return self._result("spectral_inclusion", margin > 0.0, margin, 0.0)

    def uniform_definiteness(self) -> Optional[ClauseResult]:
        """Under strict J-dissipativity both subspaces are uniformly definite."""
        report = classify(self.op)
        if not report.is_strict:
            return None
        delta_plus = self.d.sign_class_plus.definiteness_constant if self.d.M_plus.dim else np.inf
        delta_minus = self.d.sign_class_minus.definiteness_constant if self.d.M_minus.dim else np.inf
        ok = True
        if self.d.M_plus.dim:
            ok = ok and self.d.sign_class_plus.is_uniform and not self.d.sign_class_plus.degenerate
        if self.d.M_minus.dim:
            ok = ok and self.d.sign_class_minus.is_uniform and not self.d.sign_class_minus.degenerate
        value = min(delta_plus, delta_minus)
        return self._result("uniform_definiteness", ok and value > 0.0, value, 0.0,
                            f"delta+={delta_plus:.6g}, delta-={delta_minus:.6g}")

    def axis_resolvent_inherited(self, base_points: int = 128) -> ClauseResult:
        """Every sampled iw in rho(L) also lies in rho(L|M+-)."""
        L = np.asarray(self.op.L)
        grid = axis_grid(self.op.norm, base_points, np.linalg.eigvals(L).imag)
        axis_tol = config.TOL_AXIS_REL * self.scale
        in_resolvent = grid[sigma_min_shifted(L, 1j * grid) > axis_tol]
        worst = np.inf
        for M in (self.d.M_plus, self.d.M_minus):
            if M.dim == 0 or in_resolvent.size == 0:
                continue
            restricted = sigma_min_shifted(compress(L, M), 1j * in_resolvent)
            worst = min(worst, float(np.min(restricted)))
        if not np.isfinite(worst):
            return self._result("axis_resolvent_inherited", True, worst, axis_tol, "vacuous")
        return self._result("axis_resolvent_inherited", worst > axis_tol, worst, axis_tol)

    def inverse_commutation(self) -> Optional[ClauseResult]:
        """P L^{-1} = L^{-1} P whenever 0 lies in rho(L)."""
        L = np.asarray(self.op.L)
        if sigma_min(L) <= config.TOL_SPECTRUM_REL * self.scale:
            return None
        L_inv = np.linalg.inv(L)
        P = self.d.P_plus
        value = spectral_norm(P @ L_inv - L_inv @ P) / (max(spectral_norm(L_inv), 1.0) * max(spectral_norm(P), 1.0))
        return self._result("inverse_commutation", value <= self.tol, value, self.tol)

    def run(self) -> VerificationCertificate:
        logger.info("=" * 70)
        logger.info(f"VERIFYING DICHOTOMY OF {self.op.label} ({self.d.method.value})")
        logger.info("=" * 70)
        cert = VerificationCertificate(operator=self.op.label)
        checks = [
            self.invariance,
            self.semidefiniteness,
            self.maximality,
            self.spectral_inclusion,
            self.uniform_definiteness,
            self.axis_resolvent_inherited,
            self.inverse_commutation,
        ]
        for check in checks:
            try:
                clause = check()
            except KreinError as e:
                clause = self._result(check.__name__, False, np.nan, self.tol, f"{type(e).__name__}: {e}")
            if clause is not None:
                cert.clauses.append(clause)
        cert.constants.update(
            delta_plus=self.d.sign_class_plus.definiteness_constant,
            delta_minus=self.d.sign_class_minus.definiteness_constant,
        )
        passed = sum(c.passed for c in cert.clauses)
        logger.info(f"{'✓' if cert.passed else '✗'} {passed}/{len(cert.clauses)} clauses passed")
        return cert


def verify_theorem_3_2(op: OperatorSpec, d: DichotomyResult, tol: float = None) -> VerificationCertificate:
    """
    Certificate for a dichotomy of op: invariance, semidefiniteness, maximality, spectral
    inclusion, uniform definiteness (strict case only), inherited axis resolvent, and
    commutation with L^{-1} (when 0 lies in rho(L)).
    """
    return DichotomyVerifier(op, d, tol).run()


# ============================================================================
# Restricted operators: half-plane resolvent bounds and restricted identities
# ============================================================================


@dataclass
class HalfPlaneScan:
    sup: float
    argmax: complex
    tail_bound: float
    radius: float
    sup_f_minus: float


def half_plane_resolvent_scan(
    op: OperatorSpec, M: Subspace, side: str = "plus", base_points: int = 256, rays: int = 7,
) -> HalfPlaneScan:
    """
    sup of (1 + |z|) ||(L|M - z)^{-1}|| over the closed half-plane opposite to sigma(L|M).

    side="plus" scans Re z >= 0 (M+ carries Re mu < 0); side="minus" scans Re z <= 0.
    The grid is the boundary axis (peaks refined by bounded scalar search) and rays into the
    half-plane up to R = 2 max(||L|M||, 1); beyond R the value is at most (1 + R) / (R - ||L|M||).
    The F-1 variant measures the resolvent in the compressed Gram V^* M-1 V.
    """
    if side not in ("plus", "minus"):
        raise InvalidParams(f"side must be 'plus' or 'minus', got {side!r}")
    if M.dim == 0:
        raise InvalidParams("cannot scan the restriction to the zero subspace")
    sign = 1.0 if side == "plus" else -1.0
    A = compress(np.asarray(op.L), M)
    norm_A = spectral_norm(A)
    tol = config.TOL_SPECTRUM_REL * max(norm_A, 1.0)
    mu = np.linalg.eigvals(A)
    if np.any(sign * mu.real >= -tol):
        raise SpectrumInHalfPlane(
            f"restriction of {op.label} has spectrum in the scanned half-plane: {mu[sign * mu.real >= -tol]}"
        )

    radius = 2.0 * max(norm_A, 1.0)
    omega = axis_grid(norm_A, base_points, mu.imag)
    omega = omega[np.abs(omega) <= radius]
    r = np.geomspace(1e-3, radius, base_points // 4)
    angles = np.linspace(-np.pi / 2, np.pi / 2, rays + 2)[1:-1]
    ray_points = (r[:, None] * np.exp(1j * angles)[None, :]).ravel()
    points = np.concatenate([1j * omega, sign * ray_points])

    values = (1.0 + np.abs(points)) * resolvent_norms(A, points)
    best = int(np.argmax(values))
    sup, argmax = float(values[best]), complex(points[best])

    eye = np.eye(A.shape[0])
    axis_values = values[:omega.shape[0]]
    for i in np.argsort(axis_values)[::-1][:3]:
        lo = omega[max(i - 1, 0)]
        hi = omega[min(i + 1, omega.shape[0] - 1)]
        if hi <= lo:
            continue
        res = minimize_scalar(
            lambda w: -(1.0 + abs(w)) / sigma_min(A - 1j * w * eye),
            bounds=(lo, hi), method="bounded", options={"xatol": 1e-10 * max(1.0, abs(omega[i]))},
        )
        if -res.fun > sup:
            sup, argmax = float(-res.fun), complex(1j * res.x)

    gram = hermitian_part(M.basis.conj().T @ f_grams(op).Mm1 @ M.basis)
    sup_f = float(np.max((1.0 + np.abs(points)) * resolvent_norms(A, points, gram=gram)))
    tail = (1.0 + radius) / (radius - norm_A)
    logger.debug(f"half_plane_resolvent_scan({op.label}, {side}): sup={sup:.6g} at {argmax:.4g}")
    return HalfPlaneScan(sup=sup, argmax=argmax, tail_bound=tail, radius=radius, sup_f_minus=sup_f)


def restricted_identity_check(op: OperatorSpec, d: DichotomyResult, lam: complex = 0.0) -> dict:
    """
    (H1, H-1)_{1/2,2} of the restrictions L|M+- against M+- normed by +-[., .].

    Needs uniformly definite M+-; also reports the commutation of P+ with L^{-1}.
    """
    out = {}
    eye_n = np.eye(op.dim)
    for side, M, sign in (("plus", d.M_plus, 1.0), ("minus", d.M_minus, -1.0)):
        if M.dim == 0:
            continue
        G = sign * indefinite_gram(M, op.space)
        if float(np.linalg.eigvalsh(G)[0]) <= config.TOL_CLASSIFY_REL * max(spectral_norm(G), 1.0):
            raise NotSemidefinite(f"M{'+' if sign > 0 else '-'} of {op.label} is not uniformly definite")
        A = compress(np.asarray(op.L), M) - lam * np.eye(M.dim)
        A_inv = np.linalg.inv(A)
        couple = HilbertCouple(G0=hermitian_part(A.conj().T @ G @ A), G1=hermitian_part(A_inv.conj().T @ G @ A_inv))
        result = check_identity(couple, G, label=f"M{side}")
        out[side] = result
    L_shift = np.asarray(op.L) - lam * eye_n
    L_inv = np.linalg.inv(L_shift)
    out["commutation"] = spectral_norm(d.P_plus @ L_inv - L_inv @ d.P_plus)
    return out


def j_selfadjoint_projection_check(op: OperatorSpec, M: Subspace) -> Dict[str, float]:
    """
    J-selfadjoint projection P onto a uniformly definite invariant M along M^[perp].

    P = V (V^*JV)^{-1} V^* J. With L0 = L - PJP - (I - P)J(I - P) the report holds the
    extreme generalized eigenvalues of -Herm(J L0) against the F1 Gram.
    """
    V = M.basis
    G = indefinite_gram(M, op.space)
    if M.dim == 0 or float(np.min(np.abs(np.linalg.eigvalsh(G)))) <= config.TOL_CLASSIFY_REL:
        raise NotSemidefinite("projection along M^[perp] needs a uniformly definite M")
    J = op.J
    L = np.asarray(op.L)
    eye = np.eye(op.dim)
    P = V @ np.linalg.solve(G, V.conj().T @ J)
    Q = eye - P
    L0 = L - P @ J @ P - Q @ J @ Q
    lo, hi = generalized_extremes(-hermitian_part(J @ L0), f_grams(op).M1)
    return {
        "idempotency": spectral_norm(P @ P - P),
        "j_selfadjoint": spectral_norm(J @ P - (J @ P).conj().T),
        "invariance": spectral_norm(Q @ L @ P),
        "form_lower": lo,
        "form_upper": hi,
    }
