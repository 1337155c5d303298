"""
Report emission - deterministic JSON and CSV written atomically.
"""

import json
import logging
import os
import tempfile
from enum import Enum
from pathlib import Path
from typing import Any, Union

import numpy as np
import pandas as pd

from src.reporting.schemas import SWEEP_COLUMNS, AnalysisReport
from src.utils.config import config
from src.utils.errors import InvalidParams, ReportIOError

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def plain(obj: Any) -> Any:
    """Recursively convert numpy scalars, arrays, enums and tuples into JSON-ready builtins."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """Write text to a sibling temp file and rename it over path."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as e:
        raise ReportIOError(f"could not write {path}: {e}") from e
    logger.info(f"✓ Wrote {path}")
    return path


def dumps(data: Any) -> str:
    """
    Canonical JSON text: two-space indent, field order preserved.

    Floats use the shortest repr that reloads to the same double (at most 17 significant
    digits). Non-finite values are written as Infinity / -Infinity / NaN, outside RFC 8259.
    """
    return json.dumps(plain(data), indent=2, allow_nan=True, ensure_ascii=False) + "\n"


def report_json(report: AnalysisReport) -> str:
    return dumps(report.model_dump(mode="python"))


def sweep_csv(frame: pd.DataFrame) -> str:
    return frame.loc[:, list(SWEEP_COLUMNS)].to_csv(
        index=False, lineterminator="\n", float_format=CSV_FLOAT_FORMAT
    )


def emit(obj: Union[AnalysisReport, pd.DataFrame, dict], fmt: str, path: Union[str, Path, None] = None) -> str:
    """
    Serialize a report, a sweep frame or a plain record.

    Args:
        obj: AnalysisReport, sweep DataFrame, or any JSON-ready dict
        fmt: "json" or "csv" (csv only for sweep frames)
        path: Destination; when None the text is only returned

    Returns:
        The emitted text
    """
    if fmt == "json":
        if isinstance(obj, AnalysisReport):
            text = report_json(obj)
        elif isinstance(obj, pd.DataFrame):
            text = dumps({"schema_version": config.SCHEMA_VERSION,
                          "rows": obj.loc[:, list(SWEEP_COLUMNS)].to_dict(orient="records")})
        else:
            text = dumps(obj)
    elif fmt == "csv":
        if not isinstance(obj, pd.DataFrame):
            raise InvalidParams("csv output is only available for sweep results")
        text = sweep_csv(obj)
    else:
        raise InvalidParams(f"unknown output format: {fmt}")
    if path is not None:
        atomic_write_text(path, text)
    return text
