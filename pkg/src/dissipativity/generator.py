"""
Operator generator - seeded J-dissipative test operators.
Builds L = J(-P + S) with P >= 0 Hermitian and S skew-Hermitian, so JL is dissipative.
"""

import logging
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.dissipativity.classifier import OperatorSpec, classify
from src.krein.space import make_krein
from src.utils.config import config
from src.utils.errors import InvalidParams
from src.utils.linalg import psd_power

logger = logging.getLogger(__name__)


class GeneratorKind(str, Enum):
    """Operator families produced by the generator."""
    RANDOM_J_DISSIPATIVE = "random_j_dissipative"
    UNIFORM = "uniform"
    BLOCK = "block"
    DISCRETIZED = "discretized"
    COUPLED_PAIR = "coupled_pair"


def second_difference(m: int) -> np.ndarray:
    """(m+1)^2 * tridiag(-1, 2, -1): Dirichlet Laplacian on m interior nodes."""
    d = 2.0 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)
    return (m + 1) ** 2 * d


class OperatorGenerator:
    """
    Generates seeded J-dissipative operators on canonical Krein spaces.

    Every generated operator is re-checked with classify before it is returned.
    """

    def __init__(self, seed: int = None):
        """
        Initialize the generator.

        Args:
            seed: Random seed for reproducibility
        """
        self.seed = config.SWEEP_SEED if seed is None else seed
        self.rng = np.random.default_rng(self.seed)

    def _complex_normal(self, rows: int, cols: int) -> np.ndarray:
        return self.rng.standard_normal((rows, cols)) + 1j * self.rng.standard_normal((rows, cols))

    def _skew(self, n: int, scale: float) -> np.ndarray:
        if scale == 0.0 or n == 0:
            return np.zeros((n, n), dtype=complex)
        c = self._complex_normal(n, n)
        return scale * (c - c.conj().T) / (2.0 * np.sqrt(n))

    def _positive(self, n: int, delta: float, spread: float, rank: Optional[int] = None) -> np.ndarray:
        p = delta * np.eye(n, dtype=complex)
        if spread > 0.0 and n > 0:
            r = rank or n
            b = self._complex_normal(n, r)
            p = p + spread * (b @ b.conj().T) / r
        return p

    def random_j_dissipative(
        self, signature: Tuple[int, int], spread: float = 1.0, skew_scale: float = 1.0,
        rank: Optional[int] = None,
    ) -> OperatorSpec:
        """JL = -P + S with P = B B^* of the given rank (full rank by default)."""
        space = make_krein(tuple(signature))
        n = space.dim
        jl = -self._positive(n, 0.0, spread, rank) + self._skew(n, skew_scale)
        return self._finish(space.J @ jl, space, GeneratorKind.RANDOM_J_DISSIPATIVE)

    def uniform(
        self, signature: Tuple[int, int], delta: float, spread: float = 1.0, skew_scale: float = 1.0,
    ) -> OperatorSpec:
        """JL = -P + S with P >= delta * I."""
        if delta <= 0.0:
            raise InvalidParams(f"uniform margin must be positive, got {delta}")
        space = make_krein(tuple(signature))
        n = space.dim
        jl = -self._positive(n, delta, spread) + self._skew(n, skew_scale)
        op = self._finish(space.J @ jl, space, GeneratorKind.UNIFORM)
        op.metadata["delta"] = delta
        return op

    def block(
        self, signature: Tuple[int, int], coupling: float, delta: float = 0.5,
        spread: float = 1.0, skew_scale: float = 1.0,
    ) -> OperatorSpec:
        """
        Block operator [[A11, A12], [A21, A22]] with planted subordination constants.

        A11 and -A22 are dissipative; A12 = c (M+)^{1/2} U (M-)^{1/2} with ||U|| = 1 and
        A21 = A12^*, so both subordination constants equal c and the F-Grams split.
        """
        p, q = signature
        if p < 1 or q < 1:
            raise InvalidParams("block operators need p >= 1 and q >= 1")
        if coupling < 0.0:
            raise InvalidParams(f"coupling must be nonnegative, got {coupling}")
        space = make_krein((p, q))
        a11 = -self._positive(p, delta, spread) + self._skew(p, skew_scale)
        a22 = self._positive(q, delta, spread) + self._skew(q, skew_scale)
        m_plus = np.eye(p) - 0.5 * (a11 + a11.conj().T)
        m_minus = np.eye(q) + 0.5 * (a22 + a22.conj().T)
        u = self._complex_normal(p, q)
        u = u / np.linalg.norm(u, 2)
        a12 = coupling * psd_power(m_plus, 0.5) @ u @ psd_power(m_minus, 0.5)
        a21 = a12.conj().T
        L = np.block([[a11, a12], [a21, a22]])
        op = self._finish(L, space, GeneratorKind.BLOCK)
        op.metadata["planted"] = {"c_A12": coupling, "c_A21": coupling, "c0": 1.0}
        return op

    def discretized(self, n: int, coupling: float) -> OperatorSpec:
        """
        Second-difference blocks coupled off-diagonally:
        L = [[-D_p, aK], [-aK^*, D_q]] with K = D_p^{1/2} E D_q^{1/2}, ||E|| = 1.
        """
        if n < 2:
            raise InvalidParams(f"discretized family needs n >= 2, got {n}")
        if not 0.0 <= coupling < 1.0:
            raise InvalidParams(f"coupling must lie in [0, 1), got {coupling}")
        p = n // 2
        q = n - p
        space = make_krein((p, q))
        d_p = second_difference(p)
        d_q = second_difference(q)
        e = np.eye(p, q)
        k = psd_power(d_p, 0.5) @ e @ psd_power(d_q, 0.5)
        L = np.block([[-d_p, coupling * k], [-coupling * k.conj().T, d_q]])
        op = self._finish(L, space, GeneratorKind.DISCRETIZED)
        op.metadata.update(n=n, coupling=coupling)
        return op

    def coupled_pair(self, a: float) -> OperatorSpec:
        """The 2x2 family [[-1, a], [-a, 1]] with J = diag(1, -1)."""
        if not 0.0 <= a < 1.0:
            raise InvalidParams(f"coupled pair needs 0 <= a < 1, got {a}")
        L = np.array([[-1.0, a], [-a, 1.0]])
        op = self._finish(L, make_krein((1, 1)), GeneratorKind.COUPLED_PAIR)
        op.metadata["coupling"] = a
        return op

    def _finish(self, L: np.ndarray, space, kind: GeneratorKind) -> OperatorSpec:
        op = OperatorSpec(L=L, space=space, label=f"{kind.value}-seed{self.seed}", metadata={"kind": kind.value})
        if not classify(op).is_J_dissipative:
            raise InvalidParams(f"generated {kind.value} operator failed the J-dissipativity check")
        logger.debug(f"✓ Generated {op.label} (n={op.dim}, signature={space.signature})")
        return op


def generate(kind: str, signature: Tuple[int, int] = (1, 1), seed: int = None, **params) -> OperatorSpec:
    """
    Convenience function dispatching on the family name.

    Args:
        kind: One of GeneratorKind values
        signature: (p, q) of the canonical Krein space (ignored by discretized/coupled_pair)
        seed: Random seed
        **params: Family parameters (delta, coupling, n, a, spread, skew_scale, rank)

    Returns:
        Generated OperatorSpec
    """
    try:
        kind = GeneratorKind(kind)
    except ValueError:
        raise InvalidParams(f"Unknown operator family: {kind}")
    gen = OperatorGenerator(seed)
    try:
        if kind == GeneratorKind.RANDOM_J_DISSIPATIVE:
            return gen.random_j_dissipative(signature, **params)
        if kind == GeneratorKind.UNIFORM:
            return gen.uniform(signature, **params)
        if kind == GeneratorKind.BLOCK:
            return gen.block(signature, **params)
        if kind == GeneratorKind.DISCRETIZED:
            return gen.discretized(**params)
        return gen.coupled_pair(**params)
    except TypeError as e:
        raise InvalidParams(f"Invalid parameters for {kind.value}: {e}")
