"""
Resolvent scans - imaginary-axis bounds and sectorial constants.
Implements resolvent_scan (the imaginary-axis resolvent constants omega0 and c_2_19) and check_sectorial.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from src.dissipativity.classifier import OperatorSpec
from src.utils.config import config
from src.utils.errors import SpectrumInSector
from src.utils.linalg import sigma_min, sigma_min_shifted, spectral_norm

logger = logging.getLogger(__name__)


@dataclass
class ResolventScan:
    omega0: float
    c_2_19: float
    samples: List[Tuple[float, float]] = field(repr=False)
    imaginary_spectrum_detected: bool = False
    axis_points: List[float] = field(default_factory=list)
    tail_bound: float = np.inf
    omega_max: float = 0.0
    argmax: float = 0.0


@dataclass
class SectorialBound:
    c: float
    tail_bound: float
    half_angle: float
    radius: float


def axis_grid(norm_L: float, base_points: int, extra: np.ndarray = None) -> np.ndarray:
    """Symmetric log+linear grid on [-Omega, Omega] with Omega = 2||L|| + 1."""
    omega_max = 2.0 * norm_L + 1.0
    half = max(base_points // 4, 8)
    linear = np.linspace(0.0, omega_max, half)
    logarithmic = np.geomspace(1e-4 * omega_max, omega_max, half)
    positive = np.concatenate([linear, logarithmic])
    grid = np.concatenate([-positive, positive])
    if extra is not None and extra.size:
        grid = np.concatenate([grid, extra[np.abs(extra) <= omega_max]])
    return np.unique(grid)


def _local_maxima(values: np.ndarray) -> np.ndarray:
    inner = np.where((values[1:-1] >= values[:-2]) & (values[1:-1] >= values[2:]))[0] + 1
    edges = [i for i in (0, len(values) - 1) if len(values) > 1]
    idx = np.unique(np.concatenate([inner, np.array(edges, dtype=int)]))
    return idx[np.argsort(values[idx])[::-1]]


def resolvent_scan(
    op: OperatorSpec,
    base_points: int = None,
    refine_peaks: int = None,
    rtol: float = None,
) -> ResolventScan:
    """
    Scan s(w) = (1 + |w|) / sigma_min(L - iw) along the imaginary axis.

    Args:
        op: Operator to scan
        base_points: Size of the base grid (default 512)
        refine_peaks: Number of local maxima refined by bounded scalar search (default 5)
        rtol: Relative tolerance of the peak refinement (default 1e-6)

    Returns:
        ResolventScan with c_2_19 = +inf when spectrum is found on the axis
    """
    base_points = base_points or config.RESOLVENT_BASE_POINTS
    refine_peaks = config.RESOLVENT_REFINE_PEAKS if refine_peaks is None else refine_peaks
    rtol = rtol or config.RESOLVENT_REFINE_RTOL

    L = op.L
    norm_L = op.norm
    axis_tol = config.TOL_AXIS_REL * max(norm_L, 1.0)
    eigenvalues = np.linalg.eigvals(L)
    grid = axis_grid(norm_L, base_points, eigenvalues.imag)
    omega_max = float(grid[-1])

    sig = sigma_min_shifted(L, 1j * grid)
    s_values = np.where(sig > 0.0, (1.0 + np.abs(grid)) / np.maximum(sig, 1e-300), np.inf)
    samples = list(zip(grid.tolist(), s_values.tolist()))

    # Eigenvalues on the axis are caught on the grid, since their imaginary parts are grid nodes
    hits = grid[sig <= axis_tol]
    tail = (1.0 + omega_max) / (omega_max - norm_L)

    if hits.size:
        beyond = grid[np.abs(grid) > np.max(np.abs(hits))]
        omega0 = float(np.min(np.abs(beyond))) if beyond.size else omega_max
        logger.info(f"✗ {op.label}: imaginary spectrum detected near w = {hits.tolist()}")
        return ResolventScan(
            omega0=omega0,
            c_2_19=np.inf,
            samples=samples,
            imaginary_spectrum_detected=True,
            axis_points=hits.tolist(),
            tail_bound=tail,
            omega_max=omega_max,
        )

    def neg_s(w: float) -> float:
        return -(1.0 + abs(w)) / sigma_min(L - 1j * w * np.eye(op.dim))

    best_value = float(np.max(s_values))
    best_w = float(grid[int(np.argmax(s_values))])
    for i in _local_maxima(s_values)[:refine_peaks]:
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, len(grid) - 1)]
        if hi <= lo:
            continue
        res = minimize_scalar(
            neg_s, bounds=(lo, hi), method="bounded",
            options={"xatol": rtol * max(1.0, abs(grid[i]))},
        )
        if -res.fun > best_value:
            best_value, best_w = float(-res.fun), float(res.x)

    logger.debug(f"resolvent_scan({op.label}): sup s = {best_value:.6g} at w = {best_w:.6g}")
    return ResolventScan(
        omega0=0.0,
        c_2_19=best_value,
        samples=samples,
        tail_bound=tail,
        omega_max=omega_max,
        argmax=best_w,
    )


def check_sectorial(op: OperatorSpec, half_angle: float, ray_samples: int = None) -> SectorialBound:
    """
    Best c with ||(-L - lam)^{-1}|| <= c / |lam| on the rays arg lam = +-half_angle.

    The sup over the exterior of the sector is attained on its boundary rays; beyond
    R = 2||L|| the bound R / (R - ||L||) holds analytically. -L of an m-dissipative L is
    sectorial with angle pi/2, so nonzero eigenvalues of -L on that boundary (or outside
    the requested sector) raise SpectrumInSector.
    """
    ray_samples = ray_samples or config.SECTOR_RAY_SAMPLES
    A = -op.L
    norm_L = op.norm
    scale = max(norm_L, 1.0)
    radius = 2.0 * scale

    angle_tol = config.TOL_SPECTRUM_REL
    boundary = min(half_angle, np.pi / 2)
    mu = np.linalg.eigvals(A)
    nonzero = mu[np.abs(mu) > config.TOL_AXIS_REL * scale]
    if nonzero.size and np.any(np.abs(np.angle(nonzero)) >= boundary - angle_tol):
        raise SpectrumInSector(
            f"spectrum of -L reaches the boundary |arg| = {boundary:.6g} of its sector"
        )

    r = np.geomspace(1e-6 * scale, radius, ray_samples)
    c = 0.0
    for sign in (1.0, -1.0):
        lam = r * np.exp(1j * sign * half_angle)
        sig = sigma_min_shifted(A, lam)
        if np.any(sig <= config.TOL_AXIS_REL * scale):
            raise SpectrumInSector("resolvent of -L does not exist at a sampled ray point")
        c = max(c, float(np.max(np.abs(lam) / sig)))
    tail = radius / (radius - norm_L)
    return SectorialBound(c=c, tail_bound=tail, half_angle=half_angle, radius=radius)
