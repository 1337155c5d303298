"""
K-functionals and (theta, 2) interpolation norms of Hilbert couples.
The quadratic functional K2 has a closed form; the exact K is found by a root search along the minimizer path.
"""

import logging
import warnings
from typing import Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from src.interpolation.couples import HilbertCouple, weighted_mean
from src.utils.config import config
from src.utils.errors import ConvergenceFailure, InvalidParams, NonPositiveT, QuadratureFailure

logger = logging.getLogger(__name__)


def _vector(c: HilbertCouple, a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex).reshape(-1)
    if a.shape[0] != c.dim:
        raise InvalidParams(f"vector of length {a.shape[0]} for a couple of dimension {c.dim}")
    return a


def _norm(g: np.ndarray, v: np.ndarray) -> float:
    return float(np.sqrt(max(np.vdot(v, g @ v).real, 0.0)))


def k_quadratic(c: HilbertCouple, a: np.ndarray, t: float) -> float:
    """
    Quadratic K-functional K2(t, a) = inf (||a0||_0^2 + t^2 ||a1||_1^2)^{1/2}.

    Args:
        c: Hilbert couple
        a: Vector to decompose
        t: Positive parameter

    Returns:
        K2(t, a) (not squared)
    """
    if not t > 0:
        raise NonPositiveT(f"t must be positive, got {t}")
    beta, weights = c.coordinates(_vector(c, a))
    tb = t * t * beta
    return float(np.sqrt(np.sum(tb / (1.0 + tb) * weights)))


def k_exact(c: HilbertCouple, a: np.ndarray, t: float, opt_tol: float = None) -> float:
    """
    Exact K(t, a) = inf ||a - a1||_0 + t ||a1||_1.

    Interior minimizers lie on the path a1(s) = (G0 + s G1)^{-1} G0 a; the parameter s
    solving the scalar stationarity equation is bracketed on a log grid and refined with
    brentq. Without an interior root the infimum sits at a1 = 0 or a1 = a.
    """
    if not t > 0:
        raise NonPositiveT(f"t must be positive, got {t}")
    opt_tol = config.OPT_TOL if opt_tol is None else opt_tol
    a = _vector(c, a)
    endpoint = min(_norm(c.G0, a), t * _norm(c.G1, a))
    if endpoint == 0.0:
        return 0.0

    rhs = np.column_stack([c.G0 @ a, c.G1 @ a])

    def path(x: float) -> Tuple[float, float]:
        # a - a1(s) = s (G0 + s G1)^{-1} G1 a; returns (||a - a1||_0 / s, ||a1||_1)
        sol = np.linalg.solve(c.G0 + np.exp(x) * c.G1, rhs)
        return _norm(c.G0, sol[:, 1]), _norm(c.G1, sol[:, 0])

    def rho(x: float) -> float:
        d0, r1 = path(x)
        return t * d0 - r1

    beta, _ = c.coordinates(a)
    width = 20.0 + abs(np.log(beta[-1] / beta[0]))
    grid = np.linspace(np.log(t) - width, np.log(t) + width, 401)
    values = np.array([rho(x) for x in grid])
    crossings = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
    if crossings.size == 0:
        logger.debug(f"k_exact: no interior stationary point at t={t:.3e}; endpoint value used")
        return endpoint

    i = int(crossings[0])
    x_star = brentq(rho, grid[i], grid[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    d0, r1 = path(x_star)
    r0 = np.exp(x_star) * d0
    if d0 == 0.0 or r1 == 0.0:
        return endpoint
    # gradient along the path reduces to |t - s ||a1||_1 / ||a - a1||_0|
    residual = abs(t - r1 / d0) / t
    if residual > opt_tol:
        raise ConvergenceFailure(f"k_exact stationarity residual {residual:.3e} exceeds {opt_tol:.1e}")
    return float(min(r0 + t * r1, endpoint))


def interp_theta_norm(c: HilbertCouple, a: np.ndarray, theta: float) -> float:
    """(theta, 2) norm through K2: norm^2 = pi / (2 sin(pi theta)) * a^*(G0 #_theta G1) a."""
    if not 0.0 < theta < 1.0:
        raise InvalidParams(f"theta must lie in (0, 1), got {theta}")
    a = _vector(c, a)
    gram = weighted_mean(c.G0, c.G1, theta)
    factor = np.pi / (2.0 * np.sin(np.pi * theta))
    return float(np.sqrt(factor * max(np.vdot(a, gram @ a).real, 0.0)))


def interp_half_norm(
    c: HilbertCouple, a: np.ndarray, quad_tol: float = None, tail_tol: float = 1e-9,
) -> Tuple[float, float]:
    """
    (1/2, 2) norm of a, from the closed form and from the defining integral.

    Args:
        c: Hilbert couple
        a: Vector
        quad_tol: Relative tolerance of the adaptive quadrature
        tail_tol: Relative bound on the truncated tails of the log-substituted integral

    Returns:
        (closed_form, quadrature)
    """
    quad_tol = config.QUAD_TOL if quad_tol is None else quad_tol
    a = _vector(c, a)
    closed = interp_theta_norm(c, a, 0.5)
    if closed == 0.0:
        return 0.0, 0.0

    beta, weights = c.coordinates(a)
    mass = float(np.sum(weights))
    target = tail_tol * closed ** 2
    # integrand is below mass * beta_max * e^s on the left and mass * e^{-s} on the right
    s_lo = np.log(target / (beta[-1] * mass))
    s_hi = -np.log(target / mass)
    peaks = [p for p in (-0.5 * np.log(beta)) if s_lo < p < s_hi]

    def integrand(s: float) -> float:
        tb = np.exp(2.0 * s) * beta
        return float(np.exp(-s) * np.sum(tb / (1.0 + tb) * weights))

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, err = quad(
                integrand, s_lo, s_hi, points=sorted(set(peaks)) or None,
                epsabs=0.0, epsrel=quad_tol, limit=500,
            )
        except IntegrationWarning as e:
            raise QuadratureFailure(f"(1/2, 2) quadrature did not converge: {e}")
    quadrature = float(np.sqrt(value))
    logger.debug(f"interp_half_norm: closed={closed:.12g}, quadrature={quadrature:.12g}, err={err:.1e}")
    return closed, quadrature
