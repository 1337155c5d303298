"""Spectral dichotomy: Schur and contour projections, deflation, verification and block checks."""

from .blocks import (
    BlockForm,
    block_split,
    canonical_basis,
    diagonal_part,
    reassemble,
    theorem_3_7_check,
    theorem_3_8_constants,
)
from .contour import SectorContour, contour_nodes, contour_projections, default_contour, ray_edges
from .deflation import Deflation, riesz_deflate, riesz_projector
from .schur import DichotomyMethod, DichotomyResult, assemble_result, require_off_axis, schur_dichotomy
from .verification import (
    ClauseResult,
    DichotomyVerifier,
    HalfPlaneScan,
    VerificationCertificate,
    half_plane_resolvent_scan,
    j_selfadjoint_projection_check,
    restricted_identity_check,
    verify_theorem_3_2,
)

__all__ = [
    "BlockForm",
    "block_split",
    "canonical_basis",
    "diagonal_part",
    "reassemble",
    "theorem_3_7_check",
    "theorem_3_8_constants",
    "SectorContour",
    "contour_nodes",
    "contour_projections",
    "default_contour",
    "ray_edges",
    "Deflation",
    "riesz_deflate",
    "riesz_projector",
    "DichotomyMethod",
    "DichotomyResult",
    "assemble_result",
    "require_off_axis",
    "schur_dichotomy",
    "ClauseResult",
    "DichotomyVerifier",
    "HalfPlaneScan",
    "VerificationCertificate",
    "half_plane_resolvent_scan",
    "j_selfadjoint_projection_check",
    "restricted_identity_check",
    "verify_theorem_3_2",
]
