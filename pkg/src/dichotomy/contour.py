"""
Contour dichotomy - spectral projections as integrals of L(L + z)^{-1}/z over sector boundaries.
The sector S+ = {|arg z| < pi/2 - delta, |z| > r} holds -mu for every eigenvalue mu with Re mu < 0.
"""

import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from src.dichotomy.schur import DichotomyMethod, DichotomyResult, assemble_result, axis_tolerance, require_off_axis
from src.dissipativity.classifier import OperatorSpec
from src.krein.space import make_krein
from src.utils.config import config
from src.utils.errors import ContourHitsSpectrum, InvalidParams, QuadratureBudgetExceeded
from src.utils.linalg import sigma_min_shifted, spectral_norm

logger = logging.getLogger(__name__)

# Batch size of the stacked resolvent solves
SOLVE_CHUNK = 256


@dataclass(frozen=True)
class SectorContour:
    """
    Truncated boundary of S+ (and, rotated by pi, of S-).

    Attributes:
        half_angle_delta: delta, the sector opening is pi/2 - delta on each side
        inner_radius: radius of the inner arc around the origin
        truncation_radius: radius of the outer closing arc
        nodes_per_segment: starting Gauss-Legendre nodes per panel
        ray_breakpoints: radii (eigenvalue moduli) the ray panels are graded towards
    """

    half_angle_delta: float
    inner_radius: float
    truncation_radius: float
    nodes_per_segment: int = 8
    ray_breakpoints: Tuple[float, ...] = ()

    def __post_init__(self):
        if not 0.0 < self.half_angle_delta < np.pi / 2:
            raise InvalidParams(f"half_angle_delta must lie in (0, pi/2), got {self.half_angle_delta}")
        if not 0.0 < self.inner_radius < self.truncation_radius:
            raise InvalidParams(
                f"need 0 < inner_radius < truncation_radius, got {self.inner_radius}, {self.truncation_radius}"
            )
        if self.nodes_per_segment < 1:
            raise InvalidParams(f"nodes_per_segment must be positive, got {self.nodes_per_segment}")

    @property
    def opening(self) -> float:
        return np.pi / 2 - self.half_angle_delta

    def to_dict(self) -> dict:
        return {
            "half_angle_delta": self.half_angle_delta,
            "inner_radius": self.inner_radius,
            "truncation_radius": self.truncation_radius,
            "nodes_per_segment": self.nodes_per_segment,
        }


def default_contour(op: OperatorSpec) -> SectorContour:
    """
    Contour parameters from the spectrum of L.

    delta is half the smallest angular distance of sigma(-L) from iR; the inner radius is
    min(axis gap / 2, 0.1 * min |mu|); the outer radius is CONTOUR_TRUNCATION_FACTOR * ||L||.
    """
    eigenvalues = require_off_axis(op)
    moduli = np.abs(eigenvalues)
    angular_gap = float(np.min(np.arcsin(np.clip(np.abs(eigenvalues.real) / moduli, 0.0, 1.0))))
    axis_gap = float(np.min(np.abs(eigenvalues.real)))
    return SectorContour(
        half_angle_delta=min(0.5 * angular_gap, np.pi / 4),
        inner_radius=min(0.5 * axis_gap, 0.1 * float(np.min(moduli))),
        truncation_radius=config.CONTOUR_TRUNCATION_FACTOR * max(op.norm, 1.0),
        nodes_per_segment=config.CONTOUR_INITIAL_NODES,
        ray_breakpoints=tuple(sorted(set(np.round(moduli, 15).tolist()))),
    )


def _gauss_rule(edges: np.ndarray, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on the panels between consecutive edges."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    return (mid[:, None] + half[:, None] * x[None, :]).ravel(), (half[:, None] * w[None, :]).ravel()


def ray_edges(c: SectorContour) -> np.ndarray:
    """
    Panel edges in u = log|z| along a ray.

    A pole at log-radius m sits at distance >= delta off the ray, so panels are delta wide
    next to m and grow geometrically (half the distance to the nearest m) away from it, up to 1.
    """
    u_lo, u_hi = np.log(c.inner_radius), np.log(c.truncation_radius)
    centers = np.log(np.asarray([r for r in c.ray_breakpoints if r > 0.0]))
    edges = [u_lo]
    while edges[-1] < u_hi:
        u = edges[-1]
        d = float(np.min(np.abs(centers - u))) if centers.size else np.inf
        width = min(1.0, max(c.half_angle_delta, 0.5 * d))
        edges.append(min(u + width, u_hi))
    return np.asarray(edges)


def contour_nodes(c: SectorContour, nodes: int, rotation: float = 0.0) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Nodes z_k and coefficients w_k with  integral f(z) dz = sum w_k L(L + z_k)^{-1}.

    Rays are parametrized by u = log|z| (dz / z = du), arcs by the angle (dz / z = i da).
    Orientation is positive with respect to the sector: outward along arg z = -phi, the
    outer arc counterclockwise, inward along arg z = +phi, the inner arc clockwise.

    Returns:
        (z, w, inner_mask) with inner_mask flagging the inner-arc nodes
    """
    phi = c.opening
    u, wu = _gauss_rule(ray_edges(c), nodes)
    a, wa = _gauss_rule(np.linspace(-phi, phi, int(np.ceil(2.0 * phi)) + 1), nodes)

    parts: List[Tuple[np.ndarray, np.ndarray, bool]] = [
        (np.exp(u) * np.exp(-1j * phi), wu.astype(complex), False),
        (c.truncation_radius * np.exp(1j * a), 1j * wa, False),
        (np.exp(u) * np.exp(1j * phi), -wu.astype(complex), False),
        (c.inner_radius * np.exp(1j * a), -1j * wa, True),
    ]
    z = np.concatenate([p[0] for p in parts]) * np.exp(1j * rotation)
    w = np.concatenate([p[1] for p in parts])
    inner = np.concatenate([np.full(p[0].shape, p[2]) for p in parts])
    return z, w, inner


def _weighted_resolvent_sum(L: np.ndarray, z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """sum_k w_k L(L + z_k)^{-1}, evaluated as solves of (L + z_k) X = L in node order."""
    n = L.shape[0]
    eye = np.eye(n, dtype=complex)
    total = np.zeros((n, n), dtype=complex)
    for start in range(0, z.shape[0], SOLVE_CHUNK):
        zc = z[start:start + SOLVE_CHUNK]
        stack = L[None, :, :] + zc[:, None, None] * eye[None, :, :]
        X = np.linalg.solve(stack, np.broadcast_to(L, stack.shape))
        total += np.tensordot(w[start:start + SOLVE_CHUNK], X, axes=(0, 0))
    return total


def _certify_nodes(L: np.ndarray, z: np.ndarray, tol: float) -> np.ndarray:
    """sigma_min(L + z) at every node, raising ContourHitsSpectrum when one is below tol."""
    sig = sigma_min_shifted(L, -z)
    worst = int(np.argmin(sig))
    if sig[worst] <= tol:
        raise ContourHitsSpectrum(f"contour node {z[worst]:.6g} is within {sig[worst]:.3e} of sigma(-L)")
    return sig


def _check_enclosure(eigenvalues: np.ndarray, c: SectorContour, tol: float) -> None:
    """Every -mu must lie strictly inside S+ or S- and within the annulus."""
    phi = c.opening
    for mu in eigenvalues:
        nu = -mu
        r = abs(nu)
        angle = abs(np.angle(nu)) if mu.real < 0 else abs(np.angle(-nu))
        if abs(angle - phi) * r <= tol or abs(r - c.inner_radius) <= tol or abs(r - c.truncation_radius) <= tol:
            raise ContourHitsSpectrum(f"eigenvalue {mu:.6g} lies on the contour")
        if angle > phi or r < c.inner_radius or r > c.truncation_radius:
            raise InvalidParams(f"eigenvalue {mu:.6g} is not enclosed by the contour {c.to_dict()}")


def _evaluate(L: np.ndarray, c: SectorContour, nodes: int, rotation: float, tol: float):
    z, w, inner = contour_nodes(c, nodes, rotation)
    if z.size > config.CONTOUR_MAX_TOTAL_NODES:
        raise QuadratureBudgetExceeded(
            f"contour quadrature needs {z.size} nodes to reach {tol:.1e}, "
            f"above the budget of {config.CONTOUR_MAX_TOTAL_NODES}"
        )
    return z, inner, -_weighted_resolvent_sum(L, z, w) / (2j * np.pi)


def _sector_projection(L: np.ndarray, c: SectorContour, rotation: float, tol: float,
                       cert_tol: float) -> Tuple[np.ndarray, float, int, np.ndarray, int]:
    """Adaptive evaluation of -(1/2 pi i) of the sector integral; nodes doubled until stable."""
    nodes = c.nodes_per_segment
    _, _, previous = _evaluate(L, c, nodes, rotation, tol)
    while True:
        if 2 * nodes > config.CONTOUR_MAX_NODES:
            raise QuadratureBudgetExceeded(
                f"contour quadrature did not reach {tol:.1e} with {nodes} nodes per panel"
            )
        nodes *= 2
        z, inner, current = _evaluate(L, c, nodes, rotation, tol)
        change = spectral_norm(current - previous)
        if change <= tol * max(spectral_norm(current), 1.0):
            sig = _certify_nodes(L, z, cert_tol)
            return current, change, nodes, sig[inner], z.size
        previous = current


def contour_projections(op: OperatorSpec, c: SectorContour = None, tol: float = None) -> DichotomyResult:
    """
    P+ and P- as contour integrals over the boundaries of S+ and S- = -S+.

    Args:
        op: Operator with no eigenvalue on the imaginary axis
        c: Contour (default_contour(op) when omitted)
        tol: Target difference between consecutive node doublings (default CONTOUR_TOL)

    Returns:
        DichotomyResult with method "contour" and bounds for the quadrature, the
        truncated tails and the inner arc
    """
    _orientation_self_test()
    eigenvalues = require_off_axis(op)
    c = default_contour(op) if c is None else c
    if not c.ray_breakpoints:
        c = replace(c, ray_breakpoints=tuple(np.abs(eigenvalues).tolist()))
    tol = config.CONTOUR_TOL if tol is None else tol
    L = np.asarray(op.L)
    norm_L = op.norm
    cert_tol = axis_tolerance(op)
    _check_enclosure(eigenvalues, c, cert_tol)

    P_plus, err_plus, nodes_plus, sig_plus, total_plus = _sector_projection(L, c, 0.0, tol, cert_tol)
    P_minus, err_minus, nodes_minus, sig_minus, total_minus = _sector_projection(L, c, np.pi, tol, cert_tol)

    phi = c.opening
    truncation = phi * norm_L / (np.pi * max(c.truncation_radius - norm_L, np.finfo(float).tiny))
    inner_resolvent = float(1.0 / min(sig_plus.min(), sig_minus.min()))
    inner_arc = phi * norm_L * inner_resolvent / np.pi
    bounds = {
        "quadrature_error": max(err_plus, err_minus),
        "truncation_bound": truncation,
        "inner_arc_bound": inner_arc,
        "nodes_per_panel": float(max(nodes_plus, nodes_minus)),
        "total_nodes": float(total_plus + total_minus),
        "residue_mismatch": _residue_mismatch(L, P_plus),
    }
    bounds.update({f"contour_{k}": v for k, v in c.to_dict().items()})
    logger.debug(
        f"contour_projections({op.label}): quadrature change {bounds['quadrature_error']:.2e} "
        f"with {int(bounds['nodes_per_panel'])} nodes per panel"
    )
    return assemble_result(op, P_plus, P_minus, DichotomyMethod.CONTOUR, bounds=bounds)


def _residue_mismatch(L: np.ndarray, P_plus: np.ndarray) -> float:
    """||P+ - sum of eigenprojections with Re mu < 0||; nan when the eigenbasis is ill-conditioned."""
    w, V = np.linalg.eig(L)
    if np.linalg.cond(V) > 1e8:
        return float("nan")
    Vinv = np.linalg.inv(V)
    stable = w.real < 0
    residue = V[:, stable] @ Vinv[stable, :]
    return spectral_norm(P_plus - residue)


@lru_cache(maxsize=1)
def _orientation_self_test() -> bool:
    """Lock the sign convention: diag(-1, 1) must give P+ = diag(1, 0)."""
    op = OperatorSpec(L=np.diag([-1.0, 1.0]), space=make_krein((1, 1)), label="orientation-self-test")
    c = SectorContour(half_angle_delta=np.pi / 4, inner_radius=0.1, truncation_radius=64.0, nodes_per_segment=8)
    P_plus, _, _, _, _ = _sector_projection(np.asarray(op.L), c, 0.0, 1e-12, 1e-8)
    defect = spectral_norm(P_plus - np.diag([1.0, 0.0]))
    if defect > 1e-8:
        raise RuntimeError(f"contour orientation self-test failed (defect {defect:.3e})")
    logger.debug("✓ contour orientation self-test passed")
    return True
