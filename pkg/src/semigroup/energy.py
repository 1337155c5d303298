"""
Energy identities - [u0, u0] recovered from the dissipated energy along trajectories.
Forward flow v = e^{tL} u0 on M+, reversed flow v = e^{-tL} u0 on M-.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad, quad_vec

from src.dichotomy.schur import DichotomyResult
from src.dissipativity.classifier import OperatorSpec, f_grams
from src.krein.subspace import Subspace, compress, indefinite_gram
from src.semigroup.evolution import expm_action, spectral_abscissa
from src.utils.config import config
from src.utils.errors import InvalidParams, NotInSubspace, NotStableRestriction, QuadratureFailure
from src.utils.linalg import generalized_extremes, hermitian_part

logger = logging.getLogger(__name__)


@dataclass
class EnergyReport:
    """
    Terms of the finite-horizon identity [u0, u0] = [v(T), v(T)] + s * E, where
    E = -2 int_0^T Re[Lv, v] dt and s = +1 on M+ (forward flow), -1 on M- (reversed flow).
    """

    u0_indefinite_square: float
    energy_integral: float
    boundary_term: float
    residual: float
    T: float
    side: str
    quad_error: float = 0.0

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


class _Restriction(NamedTuple):
    V: np.ndarray
    A: np.ndarray
    H: np.ndarray
    G: np.ndarray
    direction: float
    alpha: float


def _side_sign(side: str) -> float:
    if side not in ("plus", "minus"):
        raise InvalidParams(f"side must be 'plus' or 'minus', got {side!r}")
    return 1.0 if side == "plus" else -1.0


def _restriction(op: OperatorSpec, M: Subspace, side: str) -> _Restriction:
    """Flow generator on M in the coordinates of its basis, checked to decay."""
    if M.dim == 0:
        raise InvalidParams("energy identities need a nonzero subspace")
    direction = _side_sign(side)
    V = M.basis
    A = direction * compress(np.asarray(op.L), M)
    alpha = spectral_abscissa(A)
    if alpha >= -config.TOL_SPECTRUM_REL * max(op.norm, 1.0):
        raise NotStableRestriction(f"flow on M{'+' if direction > 0 else '-'} does not decay (abscissa {alpha:.3e})")
    H = hermitian_part(V.conj().T @ op.J @ np.asarray(op.L) @ V)
    return _Restriction(V=V, A=A, H=H, G=indefinite_gram(M, op.space), direction=direction, alpha=alpha)


def default_horizon(alpha: float) -> float:
    return max(10.0 / abs(alpha), 1.0)


def _quad(f, T: float, tol: float) -> Tuple[float, float]:
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            return quad(f, 0.0, T, epsabs=tol, epsrel=tol, limit=200)
        except IntegrationWarning as e:
            raise QuadratureFailure(f"energy quadrature did not converge: {e}")


def energy_identity(
    op: OperatorSpec, M: Subspace, u0: np.ndarray, T: float = None, quad_tol: float = None, side: str = "plus",
) -> EnergyReport:
    """
    Check [u0, u0] = [v(T), v(T)] + s * E along the flow on an invariant subspace.

    d/dt [v, v] = 2 s Re[Lv, v] for v' = s L v, which forces the identity with
    E = -2 int_0^T Re[Lv, v] dt.

    Args:
        op: Operator
        M: Invariant subspace (M+ for side="plus", M- for side="minus")
        u0: Initial vector in M
        T: Horizon (default max(10 / |alpha|, 1))
        quad_tol: Quadrature tolerance (default QUAD_TOL)
        side: "plus" or "minus"

    Returns:
        EnergyReport
    """
    quad_tol = config.QUAD_TOL if quad_tol is None else quad_tol
    u0 = op.space.check_vector(u0)
    if not M.contains(u0, config.TOL_VERIFY):
        raise NotInSubspace(f"u0 does not lie in the given subspace of {op.label}")
    r = _restriction(op, M, side)
    T = default_horizon(r.alpha) if T is None else T
    x0 = r.V.conj().T @ u0

    def integrand(t: float) -> float:
        x = expm_action(r.A, t) @ x0
        return float(np.vdot(x, r.H @ x).real)

    integral, err = _quad(integrand, T, quad_tol * max(float(np.vdot(x0, x0).real), 1.0))
    energy = -2.0 * integral
    xT = expm_action(r.A, T) @ x0
    boundary = float(np.vdot(xT, r.G @ xT).real)
    square = float(np.vdot(x0, r.G @ x0).real)
    residual = abs(square - boundary - r.direction * energy)
    logger.debug(f"energy_identity({op.label}, {side}): [u0,u0]={square:.12g}, E={energy:.12g}, B={boundary:.3e}")
    return EnergyReport(
        u0_indefinite_square=square,
        energy_integral=energy,
        boundary_term=boundary,
        residual=residual,
        T=T,
        side=side,
        quad_error=2.0 * err,
    )


class EnergyGram(NamedTuple):
    energy: np.ndarray
    boundary: np.ndarray
    T: float


def energy_gram(op: OperatorSpec, M: Subspace, T: float = None, side: str = "plus", quad_tol: float = None) -> EnergyGram:
    """
    Energy and boundary forms as matrices in the basis of M:
    E = -2 int_0^T e^{tA^*} H e^{tA} dt and B = e^{TA^*} G e^{TA}, so that G = B + s E.
    """
    quad_tol = config.QUAD_TOL if quad_tol is None else quad_tol
    r = _restriction(op, M, side)
    T = default_horizon(r.alpha) if T is None else T

    def integrand(t: float) -> np.ndarray:
        E = expm_action(r.A, t)
        return E.conj().T @ r.H @ E

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, _ = quad_vec(integrand, 0.0, T, epsabs=quad_tol, epsrel=quad_tol, norm="max")
        except IntegrationWarning as e:
            raise QuadratureFailure(f"energy Gram quadrature did not converge: {e}")
    ET = expm_action(r.A, T)
    return EnergyGram(
        energy=hermitian_part(-2.0 * value),
        boundary=hermitian_part(ET.conj().T @ r.G @ ET),
        T=T,
    )


def definiteness_from_energy(
    op: OperatorSpec, d: DichotomyResult, sample_count: int = None, seed: int = None,
) -> Tuple[float, float]:
    """
    delta+ and delta- observed through the energy route.

    delta+ is the minimum of [u0, u0] = B + E over sampled unit u0 in M+ and over the
    extremal eigenvector of the energy form; delta- the minimum of -[u0, u0] = E - B on M-.
    Empty subspaces report 0.
    """
    sample_count = config.ENERGY_SAMPLE_COUNT if sample_count is None else sample_count
    rng = np.random.default_rng(config.SWEEP_SEED if seed is None else seed)
    observed = []
    for M, side in ((d.M_plus, "plus"), (d.M_minus, "minus")):
        if M.dim == 0:
            observed.append(0.0)
            continue
        sign = _side_sign(side)
        gram = energy_gram(op, M, side=side)
        form = sign * (gram.boundary + sign * gram.energy)
        w, Q = np.linalg.eigh(form)
        candidates = [float(w[0])]
        for x in [Q[:, 0]] + [rng.standard_normal(M.dim) + 1j * rng.standard_normal(M.dim) for _ in range(sample_count)]:
            u0 = M.basis @ (x / np.linalg.norm(x))
            report = energy_identity(op, M, u0, T=gram.T, side=side)
            candidates.append(sign * (report.boundary_term + sign * report.energy_integral))
        observed.append(min(candidates))
    logger.debug(f"definiteness_from_energy({op.label}): delta+={observed[0]:.6g}, delta-={observed[1]:.6g}")
    return observed[0], observed[1]


def energy_lower_bound_check(op: OperatorSpec, M: Subspace, u0: np.ndarray, T: float = None, side: str = "plus") -> dict:
    """
    E >= 2 delta0 int_0^T ||v||^2_F1 dt with delta0 the best constant in -Herm(JL) >= delta0 M1.

    delta0 > 0 exactly when L is uniformly J-dissipative.
    """
    u0 = op.space.check_vector(u0)
    r = _restriction(op, M, side)
    T = default_horizon(r.alpha) if T is None else T
    M1 = f_grams(op).M1
    delta0, _ = generalized_extremes(-hermitian_part(op.J @ np.asarray(op.L)), M1)
    F = hermitian_part(r.V.conj().T @ M1 @ r.V)
    x0 = r.V.conj().T @ u0

    def f1_density(t: float) -> float:
        x = expm_action(r.A, t) @ x0
        return float(np.vdot(x, F @ x).real)

    f1_integral, _ = _quad(f1_density, T, config.QUAD_TOL)
    report = energy_identity(op, M, u0, T=T, side=side)
    lower = 2.0 * delta0 * f1_integral
    slack = report.energy_integral - lower
    return {
        "energy_integral": report.energy_integral,
        "f1_integral": f1_integral,
        "delta0": delta0,
        "lower_bound": lower,
        "holds": bool(slack >= -10.0 * config.QUAD_TOL * max(abs(lower), 1.0)),
    }


def indefinite_norm_derivative_check(
    op: OperatorSpec, M: Subspace, u0: np.ndarray, t: float = 1.0,
    steps: Sequence[float] = (1e-1, 1e-2, 1e-3), side: str = "plus",
) -> dict:
    """
    Central differences of [v, v] against 2 s Re[Lv, v].

    Returns:
        Dict with the step sizes, the absolute errors and the observed convergence order
        between the first two steps
    """
    u0 = op.space.check_vector(u0)
    r = _restriction(op, M, side)
    x0 = r.V.conj().T @ u0

    def square(s: float) -> float:
        x = expm_action(r.A, s) @ x0
        return float(np.vdot(x, r.G @ x).real)

    xt = expm_action(r.A, t) @ x0
    exact = 2.0 * r.direction * float(np.vdot(xt, r.H @ xt).real)
    errors = []
    for h in steps:
        if h >= t:
            raise InvalidParams(f"step {h} must be smaller than t = {t}")
        errors.append(abs((square(t + h) - square(t - h)) / (2.0 * h) - exact))
    order = float(np.log(errors[0] / errors[1]) / np.log(steps[0] / steps[1])) if errors[1] > 0 else np.inf
    return {"steps": list(steps), "errors": errors, "order": order, "derivative": exact}
