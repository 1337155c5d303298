"""
Pydantic schemas for operator files and analysis reports.
Defines the on-disk shape of operators, certificates, reports and sweep rows.
"""

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator


class Stage(str, Enum):
    """Pipeline stages in execution order."""
    DISSIPATIVITY = "dissipativity"
    RESOLVENT = "resolvent"
    DEFLATION = "deflation"
    DICHOTOMY = "dichotomy"
    VERIFICATION = "verification"
    INTERPOLATION = "interpolation"
    SEMIGROUP = "semigroup"
    BLOCKS = "blocks"


class IdentityKind(str, Enum):
    """Interpolation identities the interp command can check."""
    TOWER = "tower"
    SHIFTED = "shifted"
    F_SCALE = "f-scale"


class SweepFamily(str, Enum):
    """Operator families a sweep can walk, with their swept parameter."""
    COUPLED_PAIR = "coupled_pair"
    DISCRETIZED = "discretized"
    UNIFORM = "uniform"
    BLOCK = "block"


# ============================================================================
# Operator files
# ============================================================================


class MatrixPayload(BaseModel):
    """Complex matrix stored as separate real and imaginary parts."""
    re: List[List[float]] = Field(..., description="Real part, row major")
    im: List[List[float]] = Field(..., description="Imaginary part, row major")

    class Config:
        extra = "forbid"

    @model_validator(mode="after")
    def _square_and_matching(self) -> "MatrixPayload":
        n = len(self.re)
        if n == 0 or any(len(row) != n for row in self.re):
            raise ValueError("re must be a non-empty square matrix")
        if len(self.im) != n or any(len(row) != n for row in self.im):
            raise ValueError("im must have the same shape as re")
        return self

    def to_array(self) -> np.ndarray:
        return np.array(self.re, dtype=float) + 1j * np.array(self.im, dtype=float)

    @classmethod
    def from_array(cls, a: np.ndarray) -> "MatrixPayload":
        a = np.asarray(a, dtype=complex)
        return cls(re=a.real.tolist(), im=a.imag.tolist())


class SignatureJ(BaseModel):
    """Canonical symmetry diag(I_p, -I_q)."""
    signature: Tuple[int, int] = Field(..., description="(p, q) with p + q = dim")

    class Config:
        extra = "forbid"

    @field_validator("signature")
    @classmethod
    def _nonnegative(cls, v: Tuple[int, int]) -> Tuple[int, int]:
        if min(v) < 0:
            raise ValueError("signature entries must be nonnegative")
        return v


class MatrixJ(BaseModel):
    """Explicit Hermitian involution."""
    matrix: MatrixPayload = Field(..., description="J as a complex matrix")

    class Config:
        extra = "forbid"


class PlantedConstants(BaseModel):
    """Off-diagonal constants a generator planted in the operator."""
    c_A12: float = Field(..., ge=0, description="Planted bound for the upper off-diagonal block")
    c_A21: float = Field(..., ge=0, description="Planted bound for the lower off-diagonal block")
    c0: Optional[float] = Field(None, ge=0, description="Planted form-comparison constant")


class OperatorFile(BaseModel):
    """Schema for a serialized operator."""
    schema_version: str = Field(..., description="Operator file schema version")
    dim: int = Field(..., ge=1, description="Dimension n of the Krein space")
    J: Union[SignatureJ, MatrixJ] = Field(..., description="Fundamental symmetry")
    L: MatrixPayload = Field(..., description="Operator matrix")
    label: Optional[str] = Field(None, description="Human readable operator name")
    planted: Optional[PlantedConstants] = Field(None, description="Generator-planted constants")

    class Config:
        extra = "forbid"


# ============================================================================
# Reports
# ============================================================================


class Certificate(BaseModel):
    """One pass/fail statement of the analysis, with the number behind it."""
    name: str = Field(..., description="Certificate identifier")
    stage: Stage = Field(..., description="Stage that issued the certificate")
    statement: str = Field(..., description="Result the certificate instantiates")
    passed: bool
    value: Optional[float] = Field(None, description="Measured quantity")
    tolerance: Optional[float] = Field(None, description="Threshold the value was held to")
    detail: str = ""

    class Config:
        use_enum_values = True


class OperatorSummary(BaseModel):
    """Identity of the analysed operator."""
    label: str
    dim: int
    signature: Tuple[int, int]
    norm: float
    metadata: Dict[str, Any] = Field(default_factory=dict)


class AnalysisReport(BaseModel):
    """Full output of the analysis pipeline."""
    schema_version: str
    operator: OperatorSummary
    stages_run: List[Stage] = Field(default_factory=list, description="Stages that completed")
    failed_stage: Optional[Stage] = Field(None, description="Stage that stopped the pipeline")
    failure_reason: Optional[str] = None
    dissipativity: Dict[str, Any] = Field(default_factory=dict)
    resolvent: Dict[str, Any] = Field(default_factory=dict)
    deflation: Optional[Dict[str, Any]] = None
    dichotomy: Dict[str, Dict[str, Any]] = Field(default_factory=dict, description="Keyed by method")
    verification: Dict[str, Any] = Field(default_factory=dict)
    interpolation: Dict[str, Dict[str, Any]] = Field(default_factory=dict, description="Keyed by identity")
    semigroup: Dict[str, Dict[str, Any]] = Field(default_factory=dict, description="Keyed by side")
    blocks: Dict[str, Any] = Field(default_factory=dict)
    certificates: List[Certificate] = Field(default_factory=list)
    passed: bool = False

    class Config:
        use_enum_values = True


SWEEP_COLUMNS = (
    "family",
    "parameter",
    "value",
    "c_2_4",
    "c_2_5",
    "m_2_16",
    "c_2_19",
    "delta_plus",
    "delta_minus",
    "equivalence_lower",
    "equivalence_upper",
    "contour_schur_residual",
    "reason",
)


class SweepRow(BaseModel):
    """One grid point of a parameter sweep; failures carry inf and a reason."""
    family: SweepFamily
    parameter: str
    value: float
    c_2_4: float = float("inf")
    c_2_5: float = float("inf")
    m_2_16: float = float("inf")
    c_2_19: float = float("inf")
    delta_plus: float = float("inf")
    delta_minus: float = float("inf")
    equivalence_lower: float = float("inf")
    equivalence_upper: float = float("inf")
    contour_schur_residual: float = float("inf")
    reason: str = ""

    class Config:
        use_enum_values = True
