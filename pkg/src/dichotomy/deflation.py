"""
Riesz deflation - removes isolated eigenvalues on or near the imaginary axis.
The complement keeps a Krein structure through a J-normalized basis.
"""

import logging
from typing import List, NamedTuple

import numpy as np

from src.dissipativity.classifier import OperatorSpec
from src.krein.space import make_krein
from src.utils.config import config
from src.utils.errors import ClusterTooClose, DegenerateComplement
from src.utils.linalg import hermitian_part, orthonormal_columns

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps

# A multiple eigenvalue of multiplicity m splits by about eps^(1/m) * ||L|| under rounding
COALESCE_FACTOR = 10.0
COALESCE_CAP = 1e-3


class Deflation(NamedTuple):
    operator: OperatorSpec
    projector: np.ndarray
    embedding: np.ndarray


def _multiplicity_radius(m: int, scale: float) -> float:
    return min(COALESCE_FACTOR * EPS ** (1.0 / m), COALESCE_CAP) * scale


def _exact_spectrum(L: np.ndarray):
    """Diagonal of a triangular L (its exact eigenvalues), None otherwise."""
    if np.array_equal(L, np.triu(L)) or np.array_equal(L, np.tril(L)):
        return np.diag(L).copy()
    return None


def _coalesce(values: np.ndarray, start: int, scale: float) -> np.ndarray:
    """
    Indices of the computed eigenvalues that split from the same multiple eigenvalue as values[start].

    The largest m whose perturbation disc (radius ~ eps^(1/m) * scale) around values[start]
    holds at least m eigenvalues decides the group.
    """
    distance = np.abs(values - values[start])
    group = np.array([start])
    for m in range(2, values.size + 1):
        members = np.flatnonzero(distance <= 2.0 * _multiplicity_radius(m, scale))
        if members.size >= m:
            group = members
    return group


def _axis_groups(eigenvalues: np.ndarray, exact: bool, tol: float, scale: float) -> List[np.ndarray]:
    """Groups of eigenvalue indices, one per multiple eigenvalue whose mean lies within tol of iR."""
    taken = np.zeros(eigenvalues.size, dtype=bool)
    groups = []
    reach = tol + (0.0 if exact else 2.0 * COALESCE_CAP * scale)
    for i in np.argsort(np.abs(eigenvalues.real)):
        if abs(eigenvalues[i].real) > reach:
            break
        if taken[i]:
            continue
        if exact:
            group = np.flatnonzero(eigenvalues == eigenvalues[i])
        else:
            group = _coalesce(eigenvalues, i, scale)
        group = group[~taken[group]]
        taken[group] = True
        if abs(np.mean(eigenvalues[group]).real) <= tol:
            groups.append(group)
        elif np.any(np.abs(eigenvalues[group].real) <= tol):
            raise ClusterTooClose(
                f"eigenvalue near {eigenvalues[i]:.6g} cannot be separated from the imaginary axis"
            )
    return groups


def riesz_projector(L: np.ndarray, center: complex, radius: float, nodes: int = None) -> np.ndarray:
    """
    (1/2 pi i) of the resolvent integral over |z - center| = radius.

    Trapezoidal rule: P = (1/N) sum r e^{i t_k} (z_k - L)^{-1}.
    """
    nodes = config.RIESZ_CIRCLE_NODES if nodes is None else nodes
    n = L.shape[0]
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    z = center + radius * np.exp(1j * theta)
    eye = np.eye(n, dtype=complex)
    stack = z[:, None, None] * eye[None, :, :] - L[None, :, :]
    R = np.linalg.solve(stack, np.broadcast_to(eye, stack.shape))
    return np.tensordot(radius * np.exp(1j * theta), R, axes=(0, 0)) / nodes


def riesz_deflate(op: OperatorSpec, tol: float = None) -> Deflation:
    """
    Project out the eigenvalues within tol of iR.

    Computed eigenvalues that lie within rounding distance of each other (about
    eps^(1/m) * ||L|| for multiplicity m) are one multiple eigenvalue, Jordan blocks
    included; a triangular L gives its eigenvalues exactly, so distinct diagonal entries stay
    distinct there. An axis eigenvalue closer than 10 * tol to the rest of the spectrum raises
    ClusterTooClose. Each one is enclosed by a circle of radius half its gap.

    Args:
        op: Operator, typically with eigenvalues on the imaginary axis
        tol: Axis tolerance (default 1e-8 * max(||L||, 1))

    Returns:
        Deflation(operator, projector, embedding): the operator on the complementary
        invariant subspace in a J-normalized basis W (W^* J W = diag(I, -I), L W = W L'),
        the Riesz projector onto the removed part and W itself
    """
    L = np.asarray(op.L)
    n = op.dim
    scale = max(op.norm, 1.0)
    tol = config.TOL_SPECTRUM_REL * scale if tol is None else tol
    exact = _exact_spectrum(L)
    eigenvalues = exact if exact is not None else np.linalg.eigvals(L)
    groups = _axis_groups(eigenvalues, exact is not None, tol, scale)
    if not groups:
        logger.debug(f"riesz_deflate({op.label}): nothing to remove")
        return Deflation(op, np.zeros((n, n), dtype=complex), np.eye(n, dtype=complex))

    P0 = np.zeros((n, n), dtype=complex)
    removed_values = []
    for group in groups:
        members = eigenvalues[group]
        center = complex(np.mean(members))
        spread = float(np.max(np.abs(members - center)))
        others = np.delete(eigenvalues, group)
        gap = float(np.min(np.abs(others - center))) if others.size else scale
        if gap < 10.0 * tol or gap <= 4.0 * spread:
            raise ClusterTooClose(f"eigenvalue at {center:.6g} is within {gap:.3e} of the remaining spectrum")
        P0 += riesz_projector(L, center, 0.5 * gap)
        removed_values.extend([center] * group.size)

    removed = len(removed_values)
    rank = int(np.sum(np.linalg.svd(P0, compute_uv=False) > 0.5))
    if rank != removed or abs(np.trace(P0).real - removed) > 1e-6:
        raise ClusterTooClose(f"Riesz projector has rank {rank}, expected the multiplicity {removed}")
    if removed >= n:
        raise DegenerateComplement(f"every eigenvalue of {op.label} lies on the imaginary axis")
    W = orthonormal_columns(np.eye(n) - P0, n - removed)
    G = hermitian_part(W.conj().T @ op.J @ W)
    lam, U = np.linalg.eigh(G)
    if np.any(np.abs(lam) <= tol):
        raise DegenerateComplement(f"the indefinite form is degenerate on the complement (|eig| = {np.min(np.abs(lam)):.3e})")

    order = np.argsort(-lam)
    lam, U = lam[order], U[:, order]
    norms = np.sqrt(np.abs(lam))
    embedding = W @ U / norms[None, :]
    compressed = W.conj().T @ L @ W
    L_complement = (norms[:, None] * (U.conj().T @ compressed @ U)) / norms[None, :]

    p = int(np.sum(lam > 0))
    space = make_krein((p, lam.shape[0] - p))
    metadata = dict(op.metadata)
    metadata["removed_eigenvalues"] = [[float(z.real), float(z.imag)] for z in removed_values]
    deflated = OperatorSpec(L=L_complement, space=space, label=f"{op.label}-deflated", metadata=metadata)
    logger.info(f"✓ Deflated {removed} near-axis eigenvalue(s) of {op.label}; complement signature {space.signature}")
    return Deflation(deflated, P0, embedding)
