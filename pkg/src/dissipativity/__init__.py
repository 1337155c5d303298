"""Dissipativity classification, F-Grams, resolvent scans and operator generation."""

from .classifier import (
    DissipativityReport,
    FGrams,
    OperatorSpec,
    assess,
    classify,
    condition_2_4,
    condition_2_5,
    condition_2_16,
    f_grams,
    injective_iff_dense_range,
    kernel_of_adjoint_trivial,
    open_right_half_plane_in_resolvent,
    resolvent_identity_residual,
    sector_angle,
)
from .generator import GeneratorKind, OperatorGenerator, generate, second_difference
from .resolvent import ResolventScan, SectorialBound, check_sectorial, resolvent_scan

__all__ = [
    "DissipativityReport",
    "FGrams",
    "OperatorSpec",
    "assess",
    "classify",
    "condition_2_4",
    "condition_2_5",
    "condition_2_16",
    "f_grams",
    "injective_iff_dense_range",
    "kernel_of_adjoint_trivial",
    "open_right_half_plane_in_resolvent",
    "resolvent_identity_residual",
    "sector_angle",
    "GeneratorKind",
    "OperatorGenerator",
    "generate",
    "second_difference",
    "ResolventScan",
    "SectorialBound",
    "check_sectorial",
    "resolvent_scan",
]
