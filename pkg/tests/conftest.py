"""
Shared fixtures: small operators with closed-form answers.
"""

from pathlib import Path

import numpy as np
import pytest

from src.dissipativity import OperatorSpec, generate
from src.krein import make_krein

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

CORPUS_SIZE = 200
CORPUS_SEED = 2024


def operator(matrix, signature=(1, 1), label="operator") -> OperatorSpec:
    return OperatorSpec(L=np.asarray(matrix, dtype=complex), space=make_krein(signature), label=label)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def diag_op() -> OperatorSpec:
    """diag(-1, 1) with J = diag(1, -1)."""
    return operator([[-1.0, 0.0], [0.0, 1.0]], label="diag")


@pytest.fixture
def coupled_op() -> OperatorSpec:
    """[[-1, 0.6], [-0.6, 1]]; eigenvalues +-0.8, delta+ = 0.8."""
    return operator([[-1.0, 0.6], [-0.6, 1.0]], label="coupled")


@pytest.fixture
def axis_op() -> OperatorSpec:
    """diag(i, 1): J-dissipative with an eigenvalue on the imaginary axis."""
    return operator([[1j, 0.0], [0.0, 1.0]], label="axis")


@pytest.fixture
def jordan_op() -> OperatorSpec:
    """Jordan block at -1 in a positive definite space."""
    return operator([[-1.0, 1.0], [0.0, -1.0]], signature=(2, 0), label="jordan")


def build_corpus(size: int = CORPUS_SIZE, seed: int = CORPUS_SEED) -> list:
    """Seeded random J-dissipative operators, n in 2..40 with p drawn from 0..n."""
    rng = np.random.default_rng(seed)
    corpus = []
    for _ in range(size):
        n = int(rng.integers(2, 41))
        p = int(rng.integers(0, n + 1))
        corpus.append(generate("random_j_dissipative", signature=(p, n - p), seed=int(rng.integers(0, 2 ** 31))))
    return corpus


@pytest.fixture(scope="session")
def j_dissipative_corpus() -> list:
    return build_corpus()
