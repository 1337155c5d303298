"""
Analysis pipeline - runs every stage on one operator and collects certificates.
Stages: dissipativity -> resolvent -> (deflation) -> dichotomy -> verification ->
interpolation -> semigroup -> blocks. A raised toolkit error stops the run and is
recorded as the failed stage; partial results are kept.
"""

import logging
from dataclasses import replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from src.dichotomy import (
    DichotomyMethod,
    DichotomyResult,
    contour_projections,
    default_contour,
    restricted_identity_check,
    riesz_deflate,
    schur_dichotomy,
    theorem_3_7_check,
    theorem_3_8_constants,
    verify_theorem_3_2,
)
from src.dissipativity import (
    OperatorSpec,
    classify,
    condition_2_4,
    condition_2_5,
    condition_2_16,
    f_grams,
    resolvent_scan,
    sector_angle,
)
from src.interpolation import (
    f_scale_identity,
    shifted_form_identity_check,
    shifted_negative_norm_constants,
    tower_identity,
)
from src.krein import compress
from src.reporting.emit import plain
from src.reporting.schemas import AnalysisReport, Certificate, IdentityKind, OperatorSummary, Stage
from src.semigroup import analytic_bounds, definiteness_from_energy, energy_identity
from src.utils.config import config
from src.utils.errors import KreinError, LambdaInSpectrum, NotSemidefinite
from src.utils.linalg import spectral_norm

logger = logging.getLogger(__name__)

# Largest admissible ||P_contour - P_schur||
AGREEMENT_TOL = 1e-6

STATEMENTS = {
    "j_dissipative": "Re[Lu, u] <= 0 for every u",
    "imaginary_axis_in_resolvent": "the imaginary axis lies in the resolvent set of L",
    "deflation": "eigenvalues on the imaginary axis split off by a Riesz projection",
    "projection_algebra": "P+ and P- are complementary idempotents commuting with L",
    "contour_schur_agreement": "contour and Schur projections coincide",
    "dichotomy": "M+ and M- are maximal semidefinite invariant subspaces splitting the spectrum",
    "f_scale_identity": "(F1, F-1) interpolated at 1/2 gives H with equal norms",
    "tower_identity": "(H1, H-1) interpolated at 1/2 gives H with equivalent norms",
    "shifted_identity": "-Re[(L - J)u, u] equals the F1 norm squared",
    "energy_identity": "[u0, u0] is recovered from the dissipated energy along the flow",
    "energy_definiteness": "the energy route and the Gram route give the same definiteness constants",
    "blocks_subordinate": "off-diagonal blocks are bounded in the diagonal energy norms",
    "planted_constants": "generator-planted block constants are recovered",
}


class AnalysisOptions(BaseModel):
    """Knobs of a pipeline run."""
    deflate: bool = Field(False, description="Split off imaginary-axis eigenvalues instead of stopping")
    methods: List[DichotomyMethod] = Field(
        default_factory=lambda: [DichotomyMethod.SCHUR, DichotomyMethod.CONTOUR],
        description="Dichotomy methods to run; the first one feeds the later stages",
    )
    tol: Optional[float] = Field(None, gt=0, description="Verification tolerance (default TOL_VERIFY)")
    contour_nodes: Optional[int] = Field(None, ge=1, description="Starting Gauss nodes per contour panel")
    identities: List[IdentityKind] = Field(default_factory=lambda: list(IdentityKind))
    sides: List[str] = Field(default_factory=lambda: ["plus", "minus"], description="Subspaces for the semigroup stage")
    horizon: Optional[float] = Field(None, gt=0, description="Energy horizon T")
    stages: Optional[List[Stage]] = Field(
        None, description="Stages to run after the dissipativity and resolvent checks (default all)"
    )


class _Stop(Exception):
    """Raised by a stage that ends the run without a toolkit error."""


class AnalysisPipeline:
    """Runs the stages in order on one operator and assembles an AnalysisReport."""

    def __init__(self, op: OperatorSpec, options: AnalysisOptions = None):
        self.source = op
        self.op = op
        self.options = options or AnalysisOptions()
        self.tol = self.options.tol if self.options.tol is not None else config.TOL_VERIFY
        self.report = AnalysisReport(
            schema_version=config.SCHEMA_VERSION,
            operator=OperatorSummary(
                label=op.label, dim=op.dim, signature=op.space.signature, norm=op.norm,
                metadata=plain(op.metadata),
            ),
        )
        self.results: Dict[str, DichotomyResult] = {}

    # ------------------------------------------------------------------
    # helpers
    # ------------------------------------------------------------------

    def _certify(self, name: str, stage: Stage, passed: bool, value: float = None,
                 tolerance: float = None, detail: str = "", statement: str = None) -> Certificate:
        cert = Certificate(
            name=name,
            stage=stage,
            statement=statement or STATEMENTS[name],
            passed=bool(passed),
            value=None if value is None else float(value),
            tolerance=None if tolerance is None else float(tolerance),
            detail=detail,
        )
        self.report.certificates.append(cert)
        log = logger.info if cert.passed else logger.warning
        log(f"{'✓' if cert.passed else '✗'} [{cert.stage}] {name} {detail}".rstrip(),
            extra={"stage": cert.stage, "operator": self.source.label})
        return cert

    @property
    def primary(self) -> DichotomyResult:
        return self.results[self.options.methods[0].value]

    # ------------------------------------------------------------------
    # stages
    # ------------------------------------------------------------------

    def _dissipativity(self) -> None:
        report = classify(self.op)
        updates = {"sector_angle": sector_angle(self.op)}
        if report.is_J_dissipative:
            g = f_grams(self.op)
            updates.update(
                c_2_4=condition_2_4(self.op, g),
                c_2_5=condition_2_5(self.op, g),
                m_2_16=condition_2_16(self.op, g),
            )
        report = replace(report, **updates)
        self.report.dissipativity = plain(report.to_dict())
        self._certify("j_dissipative", Stage.DISSIPATIVITY, report.is_J_dissipative,
                      value=report.lambda_max_herm, tolerance=0.0,
                      detail=f"uniform={report.is_uniform}, delta={report.delta_uniform:.6g}")
        if not report.is_J_dissipative:
            raise _Stop("operator is not J-dissipative")

    def _resolvent(self) -> None:
        scan = resolvent_scan(self.op)
        self.report.dissipativity.update(omega0=float(scan.omega0), c_2_19=float(scan.c_2_19))
        self.report.resolvent = plain({
            "omega0": scan.omega0,
            "c_2_19": scan.c_2_19,
            "imaginary_spectrum_detected": scan.imaginary_spectrum_detected,
            "axis_points": scan.axis_points,
            "tail_bound": scan.tail_bound,
            "omega_max": scan.omega_max,
            "argmax": scan.argmax,
            "samples": len(scan.samples),
        })
        detected = scan.imaginary_spectrum_detected
        if detected and self.options.deflate:
            # certified on the complement once deflation has run
            return
        self._certify("imaginary_axis_in_resolvent", Stage.RESOLVENT, not detected, value=scan.c_2_19,
                      detail="ImaginarySpectrumDetected" if detected else "")
        if detected:
            raise _Stop("ImaginarySpectrumDetected: rerun with deflation to split off the axis spectrum")

    def _deflation(self) -> None:
        if not self.report.resolvent.get("imaginary_spectrum_detected"):
            return
        deflation = riesz_deflate(self.op)
        self.op = deflation.operator
        removed = deflation.operator.metadata.get("removed_eigenvalues", [])
        self.report.deflation = plain({
            "removed_eigenvalues": removed,
            "complement_dim": self.op.dim,
            "complement_signature": self.op.space.signature,
            "projector_rank": int(round(np.trace(deflation.projector).real)),
        })
        self._certify("deflation", Stage.DEFLATION, True, value=len(removed),
                      detail=f"complement signature {self.op.space.signature}")
        scan = resolvent_scan(self.op)
        self.report.deflation["complement_c_2_19"] = float(scan.c_2_19)
        self._certify("imaginary_axis_in_resolvent", Stage.DEFLATION, not scan.imaginary_spectrum_detected,
                      value=scan.c_2_19, detail="on the deflated complement")

    def _dichotomy(self) -> None:
        for method in self.options.methods:
            if method == DichotomyMethod.SCHUR:
                d = schur_dichotomy(self.op)
            else:
                contour = default_contour(self.op)
                if self.options.contour_nodes is not None:
                    contour = replace(contour, nodes_per_segment=self.options.contour_nodes)
                d = contour_projections(self.op, contour)
            self.results[method.value] = d
            self.report.dichotomy[method.value] = plain(d.to_dict())
            scale = max(self.op.norm, 1.0) * max(spectral_norm(d.P_plus), 1.0) ** 2
            worst = max(d.residuals["idempotency"], d.residuals["completeness"], d.residuals["commutation"])
            self._certify("projection_algebra", Stage.DICHOTOMY, worst <= self.tol * scale,
                          value=worst, tolerance=self.tol * scale, detail=method.value)
        if len(self.results) == 2:
            diff = spectral_norm(self.results["contour"].P_plus - self.results["schur"].P_plus)
            self.report.dichotomy["agreement"] = {"p_plus_difference": float(diff)}
            self._certify("contour_schur_agreement", Stage.DICHOTOMY, diff <= AGREEMENT_TOL,
                          value=diff, tolerance=AGREEMENT_TOL)

    def _verification(self) -> None:
        certificate = verify_theorem_3_2(self.op, self.primary, tol=self.tol)
        self.report.verification = plain(certificate.to_dict())
        for clause in certificate.clauses:
            value = clause.value if np.isfinite(clause.value) or np.isinf(clause.value) else None
            self._certify(f"dichotomy_{clause.name}", Stage.VERIFICATION, clause.passed, value=value,
                          tolerance=clause.tolerance, detail=clause.detail, statement=STATEMENTS["dichotomy"])

    def _interpolation(self) -> None:
        out = self.report.interpolation
        for kind in self.options.identities:
            if kind == IdentityKind.F_SCALE:
                result = f_scale_identity(self.op)
                out[kind.value] = plain(result.to_dict())
                defect = max(abs(result.equivalence_lower - 1.0), abs(result.equivalence_upper - 1.0))
                self._certify("f_scale_identity", Stage.INTERPOLATION, defect <= self.tol,
                              value=defect, tolerance=self.tol)
            elif kind == IdentityKind.TOWER:
                try:
                    result = tower_identity(self.op, 0.0)
                except LambdaInSpectrum as e:
                    out[kind.value] = {"skipped": str(e)}
                    continue
                out[kind.value] = plain(result.to_dict())
                finite = np.isfinite(result.equivalence_upper) and result.equivalence_lower > 0
                self._certify("tower_identity", Stage.INTERPOLATION, finite, value=result.equivalence_upper,
                              detail=f"lower={result.equivalence_lower:.6g}")
            else:
                residual = shifted_form_identity_check(self.op)
                record = {"form_residual": residual}
                try:
                    record["negative_norm_constants"] = list(shifted_negative_norm_constants(self.op))
                except LambdaInSpectrum as e:
                    record["negative_norm_constants"] = None
                    record["skipped"] = str(e)
                out[kind.value] = plain(record)
                self._certify("shifted_identity", Stage.INTERPOLATION, residual <= self.tol,
                              value=residual, tolerance=self.tol)
        if not self.results:
            return
        try:
            restricted = restricted_identity_check(self.op, self.primary)
            out["restricted"] = plain({
                side: value.to_dict() if hasattr(value, "to_dict") else value for side, value in restricted.items()
            })
        except (NotSemidefinite, LambdaInSpectrum, np.linalg.LinAlgError) as e:
            out["restricted"] = {"skipped": str(e)}

    def _semigroup(self) -> None:
        d = self.primary
        for side in self.options.sides:
            M = d.M_plus if side == "plus" else d.M_minus
            if M.dim == 0:
                self.report.semigroup[side] = {"skipped": "empty subspace"}
                continue
            sign = 1.0 if side == "plus" else -1.0
            trace = analytic_bounds(sign * compress(np.asarray(self.op.L), M))
            energy = energy_identity(self.op, M, M.basis[:, 0], T=self.options.horizon, side=side)
            tolerance = max(1e3 * config.QUAD_TOL, energy.quad_error) * max(abs(energy.u0_indefinite_square), 1.0)
            self.report.semigroup[side] = plain({"bounds": trace.to_dict(), "energy": energy.to_dict()})
            self._certify("energy_identity", Stage.SEMIGROUP, energy.residual <= tolerance,
                          value=energy.residual, tolerance=tolerance, detail=side)

        observed = definiteness_from_energy(self.op, d)
        expected = (d.sign_class_plus.definiteness_constant, d.sign_class_minus.definiteness_constant)
        gaps = [abs(o - e) for o, e, M in zip(observed, expected, (d.M_plus, d.M_minus)) if M.dim]
        gap = max(gaps) if gaps else 0.0
        self.report.semigroup["definiteness"] = plain({"energy": observed, "gram": expected, "gap": gap})
        self._certify("energy_definiteness", Stage.SEMIGROUP, gap <= 1e-6, value=gap, tolerance=1e-6)

    def _blocks(self) -> None:
        constants = theorem_3_8_constants(self.op)
        shift = self.op.norm + 1.0
        comparison = theorem_3_7_check(self.op, shift, shift)
        self.report.blocks = plain({"constants": constants, "diagonal_comparison": comparison, "shift": shift})
        self._certify("blocks_subordinate", Stage.BLOCKS,
                      np.isfinite(constants["c_A12"]) and np.isfinite(constants["c_A21"]),
                      value=max(constants["c_A12"], constants["c_A21"]))
        planted = self.source.metadata.get("planted")
        if planted and self.op is self.source:
            gap = max(abs(constants[k] - v) for k, v in planted.items() if k in constants)
            tolerance = 1e-8 * max(1.0, *planted.values())
            self._certify("planted_constants", Stage.BLOCKS, gap <= tolerance, value=gap, tolerance=tolerance)

    # ------------------------------------------------------------------

    def stages(self) -> List[Tuple[Stage, Callable[[], None]]]:
        stages = [(Stage.DISSIPATIVITY, self._dissipativity), (Stage.RESOLVENT, self._resolvent)]
        if self.options.deflate:
            stages.append((Stage.DEFLATION, self._deflation))
        stages += [
            (Stage.DICHOTOMY, self._dichotomy),
            (Stage.VERIFICATION, self._verification),
            (Stage.INTERPOLATION, self._interpolation),
            (Stage.SEMIGROUP, self._semigroup),
            (Stage.BLOCKS, self._blocks),
        ]
        if self.options.stages is None:
            return stages
        wanted = set(self.options.stages) | {Stage.DISSIPATIVITY, Stage.RESOLVENT, Stage.DEFLATION}
        if wanted & {Stage.VERIFICATION, Stage.SEMIGROUP}:
            wanted.add(Stage.DICHOTOMY)
        return [(stage, step) for stage, step in stages if stage in wanted]

    def run(self) -> AnalysisReport:
        logger.info("=" * 70)
        logger.info(f"ANALYZING {self.source.label} (n={self.source.dim}, signature={self.source.space.signature})")
        logger.info("=" * 70)
        for stage, step in self.stages():
            try:
                step()
            except _Stop as e:
                self._fail(stage, str(e))
                break
            except KreinError as e:
                self._fail(stage, f"{type(e).__name__}: {e}")
                self._certify(f"{stage.value}_stage", stage, False, detail=str(e),
                              statement=f"{stage.value} stage completes")
                break
            self.report.stages_run.append(stage)
        self.report.passed = self.report.failed_stage is None and all(c.passed for c in self.report.certificates)
        logger.info(f"{'✓' if self.report.passed else '✗'} Analysis of {self.source.label} "
                    f"{'passed' if self.report.passed else 'did not pass'}")
        return self.report

    def _fail(self, stage: Stage, reason: str) -> None:
        self.report.failed_stage = stage
        self.report.failure_reason = reason
        logger.warning(f"✗ Stage {stage.value} stopped the run: {reason}",
                       extra={"stage": stage.value, "operator": self.source.label})


def analyze(op: OperatorSpec, options: AnalysisOptions = None) -> AnalysisReport:
    """Run the full pipeline on op."""
    return AnalysisPipeline(op, options).run()
