"""
Error types - one exception per failure mode of the toolkit.
Value errors derive from ValueError so callers may catch either family.
"""


class KreinError(Exception):
    """Base class for every toolkit error."""


# === krein_core ===
class NotHermitian(KreinError, ValueError):
    pass


class NotInvolutive(KreinError, ValueError):
    pass


class EmptySpace(KreinError, ValueError):
    pass


class DimensionMismatch(KreinError, ValueError):
    pass


class NonOrthonormalBasis(KreinError, ValueError):
    pass


class NotSemidefinite(KreinError, ValueError):
    pass


# === dissipativity ===
class NotJDissipative(KreinError, ValueError):
    pass


class SpectrumInSector(KreinError, ValueError):
    pass


class InvalidParams(KreinError, ValueError):
    pass


# === interpolation ===
class NonPositiveT(KreinError, ValueError):
    pass


class ConvergenceFailure(KreinError, RuntimeError):
    pass


class NotPositiveDefinite(KreinError, ValueError):
    pass


class QuadratureFailure(KreinError, RuntimeError):
    pass


class LambdaInSpectrum(KreinError, ValueError):
    pass


class MuInSpectrum(KreinError, ValueError):
    pass


# === dichotomy ===
class ImaginarySpectrum(KreinError, ValueError):
    pass


class SylvesterIllConditioned(KreinError, RuntimeError):
    pass


class ContourHitsSpectrum(KreinError, ValueError):
    pass


class QuadratureBudgetExceeded(KreinError, RuntimeError):
    pass


class ClusterTooClose(KreinError, ValueError):
    pass


class DegenerateComplement(KreinError, ValueError):
    """The complement left by deflation carries a degenerate indefinite metric."""


class SpectrumInHalfPlane(KreinError, ValueError):
    pass


class BlocksNotDissipative(KreinError, ValueError):
    pass


# === semigroup ===
class SemigroupOverflow(KreinError, OverflowError):
    pass


class NotStable(KreinError, ValueError):
    pass


class NotInSubspace(KreinError, ValueError):
    pass


class NotStableRestriction(KreinError, ValueError):
    pass


# === cli_report ===
class OperatorParseError(KreinError, ValueError):
    """Malformed operator file; carries the line and column of the defect."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SchemaError(KreinError, ValueError):
    pass


class InvariantViolation(KreinError, ValueError):
    pass


class ReportIOError(KreinError, OSError):
    pass


# Errors that signal bad user input (CLI exit code 2)
INPUT_ERRORS = (OperatorParseError, SchemaError, InvariantViolation, InvalidParams, FileNotFoundError)
