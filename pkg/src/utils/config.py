# ============================================================================
# CONFIG LOADER - Centralized Configuration Management
# ============================================================================

import os
from typing import Dict, Any
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, default))


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, default))


class Config:
    """Centralized configuration object."""

    # === APPLICATION ===
    ENV = os.getenv('ENV', 'development')
    DEBUG = os.getenv('DEBUG', 'false').lower() == 'true'
    PROJECT_NAME = os.getenv('PROJECT_NAME', 'krein-dichotomy-toolkit')

    # === LOGGING ===
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FORMAT = os.getenv('LOG_FORMAT', 'text')  # json | text

    # === TOLERANCES ===
    # Absolute tolerances scale with the dimension n (see tol_structural).
    TOL_HERM = _env_float('KREIN_TOL_HERM', 1e-10)
    TOL_INV = _env_float('KREIN_TOL_INV', 1e-10)
    TOL_ORTH = _env_float('KREIN_TOL_ORTH', 1e-10)
    TOL_CLASSIFY_REL = _env_float('KREIN_TOL_CLASSIFY_REL', 1e-8)
    TOL_AXIS_REL = _env_float('KREIN_TOL_AXIS_REL', 1e-10)
    TOL_SPECTRUM_REL = _env_float('KREIN_TOL_SPECTRUM_REL', 1e-8)
    TOL_DISSIPATIVE = _env_float('KREIN_TOL_DISSIPATIVE', 1e-10)
    TOL_VERIFY = _env_float('KREIN_TOL_VERIFY', 1e-8)
    QUAD_TOL = _env_float('KREIN_QUAD_TOL', 1e-9)
    OPT_TOL = _env_float('KREIN_OPT_TOL', 1e-8)
    STRICT_MODE = os.getenv('KREIN_STRICT', 'false').lower() == 'true'

    # === RESOLVENT SCAN ===
    RESOLVENT_BASE_POINTS = _env_int('KREIN_RESOLVENT_BASE_POINTS', 512)
    RESOLVENT_REFINE_PEAKS = _env_int('KREIN_RESOLVENT_REFINE_PEAKS', 5)
    RESOLVENT_REFINE_RTOL = _env_float('KREIN_RESOLVENT_REFINE_RTOL', 1e-6)
    SECTOR_RAY_SAMPLES = _env_int('KREIN_SECTOR_RAY_SAMPLES', 400)
    SVD_DENSE_LIMIT = _env_int('KREIN_SVD_DENSE_LIMIT', 200)

    # === CONTOUR QUADRATURE ===
    CONTOUR_INITIAL_NODES = _env_int('KREIN_CONTOUR_INITIAL_NODES', 8)
    CONTOUR_MAX_NODES = _env_int('KREIN_CONTOUR_MAX_NODES', 256)  # per panel
    CONTOUR_MAX_TOTAL_NODES = _env_int('KREIN_CONTOUR_MAX_TOTAL_NODES', 200_000)
    CONTOUR_TOL = _env_float('KREIN_CONTOUR_TOL', 1e-10)
    CONTOUR_TRUNCATION_FACTOR = _env_float('KREIN_CONTOUR_TRUNCATION_FACTOR', 64.0)
    RIESZ_CIRCLE_NODES = _env_int('KREIN_RIESZ_CIRCLE_NODES', 64)

    # === SEMIGROUP ===
    SEMIGROUP_GRID_POINTS = _env_int('KREIN_SEMIGROUP_GRID_POINTS', 400)
    ENERGY_SAMPLE_COUNT = _env_int('KREIN_ENERGY_SAMPLE_COUNT', 16)

    # === SWEEP / OUTPUT ===
    NUM_THREADS = _env_int('KREIN_NUM_THREADS', 1)
    SWEEP_SEED = _env_int('KREIN_SWEEP_SEED', 42)
    SCHEMA_VERSION = os.getenv('KREIN_SCHEMA_VERSION', '1.0')

    # === COMPUTED VALUES ===
    @property
    def worker_count(self) -> int:
        """Worker pool size for sweeps, never below one."""
        return max(1, self.NUM_THREADS)

    TOLERANCE_FIELDS = (
        'TOL_HERM', 'TOL_INV', 'TOL_ORTH', 'TOL_CLASSIFY_REL', 'TOL_AXIS_REL',
        'TOL_SPECTRUM_REL', 'TOL_DISSIPATIVE', 'TOL_VERIFY', 'QUAD_TOL', 'OPT_TOL',
        'CONTOUR_TOL',
    )

    def tol_structural(self, n: int, kind: str = "herm") -> float:
        """Scale-aware tolerance for the Hermitian (herm), involution (inv) and orthonormality (orth) checks."""
        base = {"herm": self.TOL_HERM, "inv": self.TOL_INV, "orth": self.TOL_ORTH}[kind]
        return base * max(n, 1)

    def apply_tolerance_factor(self, factor: float) -> None:
        """Multiply every tolerance by factor (strict mode uses 0.5)."""
        for name in self.TOLERANCE_FIELDS:
            setattr(self, name, getattr(self, name) * factor)

    def to_dict(self) -> Dict[str, Any]:
        """Export config as dictionary."""
        return {
            k: getattr(self, k)
            for k in dir(self)
            if k.isupper() and not k.startswith('_')
        }


# Singleton instance
config = Config()
if config.STRICT_MODE:
    config.apply_tolerance_factor(0.5)
