"""
Operator and report loaders - JSON files validated through the pydantic schemas.
"""

import json
import logging
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from src.dissipativity.classifier import OperatorSpec
from src.krein.space import make_krein
from src.reporting.emit import atomic_write_text, dumps
from src.reporting.schemas import AnalysisReport, MatrixJ, MatrixPayload, OperatorFile, PlantedConstants, SignatureJ
from src.utils.config import config
from src.utils.errors import (
    DimensionMismatch,
    EmptySpace,
    InvariantViolation,
    NotHermitian,
    NotInvolutive,
    OperatorParseError,
    SchemaError,
)

logger = logging.getLogger(__name__)


def _read_json(path: Path) -> object:
    text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise OperatorParseError(f"{path}: {e.msg}", line=e.lineno, column=e.colno) from e


def _schema_error(path: Path, e: ValidationError) -> SchemaError:
    first = e.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<root>"
    return SchemaError(f"{path}: field {location}: {first['msg']} ({e.error_count()} error(s))")


def parse_operator(data: object, source: str = "<memory>") -> OperatorSpec:
    """
    Build an OperatorSpec from decoded JSON.

    Raises:
        SchemaError: Missing or mistyped fields
        InvariantViolation: J not a Hermitian involution, or dimensions that disagree
    """
    try:
        payload = OperatorFile.model_validate(data)
    except ValidationError as e:
        raise _schema_error(Path(source), e) from e

    metadata = {}
    try:
        if isinstance(payload.J, SignatureJ):
            p, q = payload.J.signature
            if p + q != payload.dim:
                raise InvariantViolation(f"{source}: signature ({p}, {q}) does not add up to dim {payload.dim}")
            space = make_krein((p, q))
        else:
            space = make_krein(payload.J.matrix.to_array())
            metadata["j_format"] = "matrix"
    except (NotHermitian, NotInvolutive, EmptySpace) as e:
        raise InvariantViolation(f"{source}: {e}") from e

    L = payload.L.to_array()
    if space.dim != payload.dim or L.shape[0] != payload.dim:
        raise InvariantViolation(
            f"{source}: dim = {payload.dim} but J is {space.dim}x{space.dim} and L is {L.shape[0]}x{L.shape[0]}"
        )
    if payload.planted is not None:
        metadata["planted"] = payload.planted.model_dump(exclude_none=True)
    try:
        return OperatorSpec(L=L, space=space, label=payload.label or Path(source).stem, metadata=metadata)
    except DimensionMismatch as e:
        raise InvariantViolation(f"{source}: {e}") from e


def load_operator(path: Union[str, Path]) -> OperatorSpec:
    """
    Load an operator file.

    Args:
        path: JSON file with schema_version, dim, J (signature or matrix), L (re/im) and optional label

    Returns:
        OperatorSpec
    """
    path = Path(path)
    op = parse_operator(_read_json(path), source=str(path))
    logger.info(f"✓ Loaded {op.label} (n={op.dim}, signature={op.space.signature}) from {path}")
    return op


def operator_payload(op: OperatorSpec) -> OperatorFile:
    if op.space.is_canonical and op.metadata.get("j_format") != "matrix":
        j = SignatureJ(signature=op.space.signature)
    else:
        j = MatrixJ(matrix=MatrixPayload.from_array(op.J))
    planted = op.metadata.get("planted")
    return OperatorFile(
        schema_version=config.SCHEMA_VERSION,
        dim=op.dim,
        J=j,
        L=MatrixPayload.from_array(op.L),
        label=op.label,
        planted=PlantedConstants(**planted) if planted else None,
    )


def save_operator(op: OperatorSpec, path: Union[str, Path]) -> Path:
    """Write op in canonical formatting; load_operator(save_operator(op)) reproduces it exactly."""
    return atomic_write_text(path, dumps(operator_payload(op).model_dump(mode="python", exclude_none=True)))


def load_report(path: Union[str, Path]) -> AnalysisReport:
    path = Path(path)
    data = _read_json(path)
    try:
        return AnalysisReport.model_validate(data)
    except ValidationError as e:
        raise _schema_error(path, e) from e
