"""
Semigroup evolution - matrix exponentials, analytic-semigroup bounds and Cauchy trajectories.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize_scalar

from src.utils.config import config
from src.utils.errors import InvalidParams, NonPositiveT, NotStable, SemigroupOverflow
from src.utils.linalg import as_complex_matrix, spectral_norm

logger = logging.getLogger(__name__)

# e^{x} overflows double precision near x = 709
OVERFLOW_EXPONENT = 700.0


def spectral_abscissa(A: np.ndarray) -> float:
    A = as_complex_matrix(A, "A")
    return float(np.max(np.linalg.eigvals(A).real))


def expm_action(A: np.ndarray, t: float) -> np.ndarray:
    """
    e^{tA} by scaling and squaring (scipy expm).

    Args:
        A: Square matrix
        t: Time, t >= 0

    Returns:
        e^{tA}; exactly I at t = 0
    """
    A = as_complex_matrix(A, "A")
    if t < 0:
        raise InvalidParams(f"t must be nonnegative, got {t}")
    n = A.shape[0]
    if t == 0:
        return np.eye(n, dtype=complex)
    growth = spectral_abscissa(A) * t
    if growth > OVERFLOW_EXPONENT:
        raise SemigroupOverflow(f"alpha(A) * t = {growth:.3e} exceeds {OVERFLOW_EXPONENT:.0f}")
    return sla.expm(t * A)


def semigroup_law_residual(A: np.ndarray, s: float, t: float) -> float:
    """||e^{(s+t)A} - e^{sA} e^{tA}|| relative to ||e^{sA}|| ||e^{tA}||."""
    Es = expm_action(A, s)
    Et = expm_action(A, t)
    return spectral_norm(expm_action(A, s + t) - Es @ Et) / max(spectral_norm(Es) * spectral_norm(Et), 1.0)


@dataclass
class SemigroupTrace:
    """Sampled norms of e^{tA} and t A e^{tA} with certified tail bounds."""

    time_grid: np.ndarray
    norm_e_tA: np.ndarray
    norm_tA_e_tA: np.ndarray
    sup_bounds: Tuple[float, float]
    tail_bounds: Tuple[float, float]
    abscissa: float
    lyapunov_constant: float

    def to_dict(self) -> dict:
        return {
            "sup_e_tA": self.sup_bounds[0],
            "sup_tA_e_tA": self.sup_bounds[1],
            "tail_e_tA": self.tail_bounds[0],
            "tail_tA_e_tA": self.tail_bounds[1],
            "abscissa": self.abscissa,
            "lyapunov_constant": self.lyapunov_constant,
            "t_min": float(self.time_grid[0]),
            "t_max": float(self.time_grid[-1]),
            "grid_points": int(self.time_grid.shape[0]),
        }


def lyapunov_constant(A: np.ndarray, alpha: float) -> float:
    """
    C with ||e^{tA}|| <= C e^{alpha t / 2} for all t >= 0.

    A_s = A - (alpha/2) I is stable; with A_s^* X + X A_s = -I the X-norm is
    nonincreasing along e^{t A_s}, hence C = sqrt(cond X).
    """
    n = A.shape[0]
    A_s = A - 0.5 * alpha * np.eye(n)
    X = sla.solve_continuous_lyapunov(A_s.conj().T, -np.eye(n))
    w = np.linalg.eigvalsh(0.5 * (X + X.conj().T))
    return float(np.sqrt(w[-1] / w[0]))


def _refine_peak(f, grid: np.ndarray, values: np.ndarray) -> float:
    i = int(np.argmax(values))
    lo = np.log(grid[max(i - 1, 0)])
    hi = np.log(grid[min(i + 1, len(grid) - 1)])
    best = float(values[i])
    if hi > lo:
        res = minimize_scalar(lambda x: -f(np.exp(x)), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10})
        best = max(best, float(-res.fun))
    return best


def analytic_bounds(A: np.ndarray, grid_points: int = None, t_max: float = None) -> SemigroupTrace:
    """
    sup_t ||e^{tA}|| and sup_t t ||A e^{tA}|| for a stable A.

    Log-spaced grid on [1e-4 / max(||A||, 1), t_max] with t_max >= 10 / |alpha|, the grid
    peaks refined by bounded scalar search; beyond t_max the Lyapunov constant C bounds
    ||e^{tA}|| by C e^{alpha t / 2} and t ||A e^{tA}|| by t ||A|| C e^{alpha t / 2}.
    """
    A = as_complex_matrix(A, "A")
    grid_points = grid_points or config.SEMIGROUP_GRID_POINTS
    alpha = spectral_abscissa(A)
    norm_A = spectral_norm(A)
    if alpha >= -config.TOL_SPECTRUM_REL * max(norm_A, 1.0):
        raise NotStable(f"spectral abscissa {alpha:.3e} is not negative")

    t_min = 1e-4 / max(norm_A, 1.0)
    t_max = max(10.0 / abs(alpha), 10.0 * t_min) if t_max is None else t_max
    grid = np.geomspace(t_min, t_max, grid_points)

    def norm_e(t: float) -> float:
        return spectral_norm(expm_action(A, t))

    def norm_tae(t: float) -> float:
        return t * spectral_norm(A @ expm_action(A, t))

    e_vals = np.array([norm_e(t) for t in grid])
    tae_vals = np.array([norm_tae(t) for t in grid])

    C = lyapunov_constant(A, alpha)
    decay = np.exp(0.5 * alpha * t_max)
    tail_e = C * decay
    tail_tae = t_max * norm_A * C * decay

    sup_e = max(1.0, _refine_peak(norm_e, grid, e_vals), tail_e)
    sup_tae = max(_refine_peak(norm_tae, grid, tae_vals), tail_tae)
    logger.debug(f"analytic_bounds: alpha={alpha:.3e}, sup ||e^tA||={sup_e:.6g}, sup t||Ae^tA||={sup_tae:.6g}")
    return SemigroupTrace(
        time_grid=grid,
        norm_e_tA=e_vals,
        norm_tA_e_tA=tae_vals,
        sup_bounds=(sup_e, sup_tae),
        tail_bounds=(tail_e, tail_tae),
        abscissa=alpha,
        lyapunov_constant=C,
    )


class Trajectory(NamedTuple):
    times: np.ndarray
    states: np.ndarray


def cauchy_evolve(A: np.ndarray, u0: np.ndarray, T: float, steps: int, reverse: bool = False) -> Trajectory:
    """
    Samples of u(t) = e^{tA} u0 (or e^{-tA} u0 when reverse) at steps equispaced times in [0, T].

    Each sample is an independent exponential, so the endpoint equals expm_action(A, T) u0.
    """
    if steps < 2:
        raise InvalidParams(f"steps must be at least 2, got {steps}")
    if not T > 0:
        raise NonPositiveT(f"T must be positive, got {T}")
    A = as_complex_matrix(A, "A")
    generator = -A if reverse else A
    u0 = np.asarray(u0, dtype=complex).reshape(-1)
    times = np.linspace(0.0, T, steps)
    states = np.stack([expm_action(generator, t) @ u0 for t in times])
    return Trajectory(times=times, states=states)
