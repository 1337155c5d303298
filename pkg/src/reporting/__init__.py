"""Operator files, the analysis pipeline, parameter sweeps and report emission."""

from .emit import atomic_write_text, dumps, emit, plain, report_json, sweep_csv
from .loaders import load_operator, load_report, operator_payload, parse_operator, save_operator
from .pipeline import AnalysisOptions, AnalysisPipeline, analyze
from .schemas import (
    SWEEP_COLUMNS,
    AnalysisReport,
    Certificate,
    IdentityKind,
    MatrixPayload,
    OperatorFile,
    Stage,
    SweepFamily,
    SweepRow,
)
from .sweep import parse_grid, sweep

__all__ = [
    "atomic_write_text",
    "dumps",
    "emit",
    "plain",
    "report_json",
    "sweep_csv",
    "load_operator",
    "load_report",
    "operator_payload",
    "parse_operator",
    "save_operator",
    "AnalysisOptions",
    "AnalysisPipeline",
    "analyze",
    "SWEEP_COLUMNS",
    "AnalysisReport",
    "Certificate",
    "IdentityKind",
    "MatrixPayload",
    "OperatorFile",
    "Stage",
    "SweepFamily",
    "SweepRow",
    "parse_grid",
    "sweep",
]
