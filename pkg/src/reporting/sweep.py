"""
Parameter sweeps - constants of an operator family tabulated over a grid.
Grid points run in a joblib worker pool; row order follows the grid.
"""

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from src.dichotomy import contour_projections, schur_dichotomy
from src.dissipativity import assess, generate
from src.interpolation import tower_identity
from src.reporting.schemas import SWEEP_COLUMNS, SweepFamily, SweepRow
from src.utils.config import config
from src.utils.errors import InvalidParams, KreinError
from src.utils.linalg import spectral_norm

logger = logging.getLogger(__name__)

# family -> (swept parameter, fixed generator arguments)
FAMILY_PARAMETERS: Dict[SweepFamily, Tuple[str, dict]] = {
    SweepFamily.COUPLED_PAIR: ("a", {}),
    SweepFamily.DISCRETIZED: ("n", {"coupling": 0.5}),
    SweepFamily.UNIFORM: ("delta", {"signature": (2, 2)}),
    SweepFamily.BLOCK: ("coupling", {"signature": (2, 2)}),
}


def parse_grid(text: str) -> np.ndarray:
    """
    Grid from text: "start:stop:count" for a linspace, or a comma separated list.

    An empty string gives an empty grid.
    """
    text = text.strip()
    if not text:
        return np.zeros(0)
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return np.linspace(float(start), float(stop), int(count))
        return np.array([float(x) for x in text.split(",")])
    except ValueError as e:
        raise InvalidParams(f"bad grid {text!r}: {e}") from e


def _point(family: SweepFamily, value: float, seed: int) -> dict:
    parameter, fixed = FAMILY_PARAMETERS[family]
    row = SweepRow(family=family, parameter=parameter, value=float(value))
    params = dict(fixed)
    signature = params.pop("signature", (1, 1))
    params[parameter] = int(round(value)) if parameter == "n" else float(value)
    try:
        op = generate(family.value, signature=signature, seed=seed, **params)
        report = assess(op)
        schur = schur_dichotomy(op)
        contour = contour_projections(op)
        tower = tower_identity(op, 0.0)
        updates = {
            "c_2_4": report.c_2_4,
            "c_2_5": report.c_2_5,
            "m_2_16": report.m_2_16,
            "c_2_19": report.c_2_19,
            "delta_plus": schur.sign_class_plus.definiteness_constant,
            "delta_minus": schur.sign_class_minus.definiteness_constant,
            "equivalence_lower": tower.equivalence_lower,
            "equivalence_upper": tower.equivalence_upper,
            "contour_schur_residual": spectral_norm(contour.P_plus - schur.P_plus),
        }
    except (KreinError, np.linalg.LinAlgError) as e:
        logger.warning(f"✗ {family.value} at {parameter}={value}: {type(e).__name__}: {e}")
        return row.model_dump(mode="python") | {"reason": f"{type(e).__name__}: {e}"}

    missing = [k for k, v in updates.items() if v is None or np.isnan(v)]
    updates = {k: (np.inf if k in missing else float(v)) for k, v in updates.items()}
    row = row.model_copy(update=updates)
    if missing:
        row.reason = f"undefined: {', '.join(missing)}"
    return row.model_dump(mode="python")


def sweep(family: str, grid: Sequence[float], seed: Optional[int] = None, n_jobs: Optional[int] = None) -> pd.DataFrame:
    """
    Tabulate the constants of a family over grid.

    Args:
        family: One of SweepFamily values
        grid: Parameter values (a for coupled_pair, n for discretized, delta for uniform,
            coupling for block)
        seed: Generator seed shared by every grid point (default SWEEP_SEED)
        n_jobs: Worker count (default config.worker_count)

    Returns:
        DataFrame with SWEEP_COLUMNS; failed points hold inf and a reason
    """
    try:
        family = SweepFamily(family)
    except ValueError:
        raise InvalidParams(f"Unknown sweep family: {family}")
    seed = config.SWEEP_SEED if seed is None else seed
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        return pd.DataFrame(columns=list(SWEEP_COLUMNS))

    n_jobs = config.worker_count if n_jobs is None else n_jobs
    logger.info(f"Sweeping {family.value} over {grid.size} point(s) with {n_jobs} worker(s)")
    rows = Parallel(n_jobs=n_jobs)(delayed(_point)(family, value, seed) for value in grid)
    frame = pd.DataFrame(rows, columns=list(SWEEP_COLUMNS))
    failed = int((frame["reason"] != "").sum())
    logger.info(f"{'✓' if failed == 0 else '✗'} Sweep finished: {grid.size - failed}/{grid.size} points clean")
    return frame
