"""
Phase 6 Test - Reports, sweeps and the command line
Operator files, the analysis pipeline, deterministic emission, sweeps and CLI exit codes.
"""

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main
from src.reporting.emit import dumps
from src.reporting import (
    SWEEP_COLUMNS,
    AnalysisOptions,
    AnalysisReport,
    Stage,
    analyze,
    emit,
    load_operator,
    load_report,
    parse_grid,
    parse_operator,
    save_operator,
    sweep,
)
from src.utils.config import config
from src.utils.errors import InvalidParams, InvariantViolation, OperatorParseError, SchemaError

logging.basicConfig(level=logging.INFO, format='%(message)s')
logger = logging.getLogger(__name__)

SCHEMA_FILE = Path(__file__).resolve().parents[2] / "schemas" / "analysis_report.schema.json"


def _payload(**overrides) -> dict:
    data = {
        "schema_version": "1.0",
        "dim": 2,
        "J": {"signature": [1, 1]},
        "L": {"re": [[-1.0, 0.0], [0.0, 1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]},
    }
    data.update(overrides)
    return data


def _certificate(report: AnalysisReport, name: str):
    matches = [c for c in report.certificates if c.name == name]
    assert matches, f"no certificate {name}"
    return matches[0]


# ============================================================================
# Operator files
# ============================================================================


def test_load_fixtures(fixtures_dir):
    logger.info("\n[TEST 1] Loading fixture operators\n")
    coupled = load_operator(fixtures_dir / "coupled.json")
    assert coupled.label == "coupled"
    assert coupled.space.signature == (1, 1)
    np.testing.assert_array_equal(coupled.L, [[-1.0, 0.6], [-0.6, 1.0]])
    axis = load_operator(fixtures_dir / "axis.json")
    assert axis.L[0, 0] == 1j
    block = load_operator(fixtures_dir / "block.json")
    assert block.metadata["planted"] == {"c_A12": 0.25, "c_A21": 0.25, "c0": 1.0}
    logger.info("✓ Fixtures parsed")


@pytest.mark.parametrize("name", ["diag", "coupled", "axis", "jordan", "block"])
def test_save_reproduces_fixture_bytes(fixtures_dir, tmp_path, name):
    source = fixtures_dir / f"{name}.json"
    target = save_operator(load_operator(source), tmp_path / f"{name}.json")
    assert target.read_bytes() == source.read_bytes()


def test_explicit_j_matrix_survives_round_trip(tmp_path):
    data = _payload(J={"matrix": {"re": [[0.0, 1.0], [1.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}})
    op = parse_operator(data)
    assert op.metadata["j_format"] == "matrix"
    again = load_operator(save_operator(op, tmp_path / "swap.json"))
    np.testing.assert_array_equal(again.J, [[0.0, 1.0], [1.0, 0.0]])


def test_parse_error_carries_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "dim": 2,\n  oops\n}\n', encoding="utf-8")
    with pytest.raises(OperatorParseError) as info:
        load_operator(path)
    assert info.value.line == 3
    assert info.value.column == 3


def test_schema_errors():
    data = _payload()
    del data["L"]
    with pytest.raises(SchemaError, match="L"):
        parse_operator(data)
    with pytest.raises(SchemaError):
        parse_operator(_payload(extra_field=1))
    with pytest.raises(SchemaError):
        parse_operator(_payload(L={"re": [[1.0, 0.0]], "im": [[0.0, 0.0]]}))


def test_invariant_violations():
    with pytest.raises(InvariantViolation):
        parse_operator(_payload(J={"matrix": {"re": [[1.0, 0.0], [0.0, 2.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}}))
    with pytest.raises(InvariantViolation, match="does not add up"):
        parse_operator(_payload(J={"signature": [1, 2]}))
    with pytest.raises(InvariantViolation):
        parse_operator(_payload(dim=3, J={"signature": [2, 1]}))


# ============================================================================
# Pipeline
# ============================================================================


def test_analyze_coupled_passes(fixtures_dir):
    logger.info("\n[TEST 2] Full pipeline on the coupled pair\n")
    report = analyze(load_operator(fixtures_dir / "coupled.json"))
    assert report.passed, [c.name for c in report.certificates if not c.passed]
    assert report.failed_stage is None
    assert report.stages_run == [s.value for s in Stage if s != Stage.DEFLATION]
    assert set(report.dichotomy) == {"schur", "contour", "agreement"}
    assert _certificate(report, "dichotomy_uniform_definiteness").value == pytest.approx(0.8)
    assert report.dissipativity["is_J_dissipative"]
    logger.info(f"✓ {len(report.certificates)} certificates passed")


def test_analyze_not_dissipative_stops_first():
    op = parse_operator(_payload(L={"re": [[1.0, 0.0], [0.0, -1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}))
    report = analyze(op)
    assert not report.passed
    assert report.failed_stage == Stage.DISSIPATIVITY.value
    assert report.stages_run == []
    assert not _certificate(report, "j_dissipative").passed


def test_analyze_axis_spectrum(fixtures_dir):
    logger.info("\n[TEST 3] Imaginary-axis eigenvalue\n")
    op = load_operator(fixtures_dir / "axis.json")
    report = analyze(op)
    assert not report.passed
    assert report.failed_stage == Stage.RESOLVENT.value
    assert "ImaginarySpectrumDetected" in report.failure_reason
    assert report.dichotomy == {}

    deflated = analyze(op, AnalysisOptions(deflate=True))
    assert deflated.passed, [c.name for c in deflated.certificates if not c.passed]
    assert Stage.DEFLATION.value in deflated.stages_run
    assert deflated.deflation["complement_dim"] == 1
    assert deflated.deflation["removed_eigenvalues"] == [[0.0, 1.0]]
    logger.info("✓ Stops at the resolvent scan; deflation recovers")


def test_planted_constants_recovered(fixtures_dir):
    report = analyze(load_operator(fixtures_dir / "block.json"))
    cert = _certificate(report, "planted_constants")
    assert cert.passed
    assert report.blocks["constants"]["c_A12"] == pytest.approx(0.25)
    assert report.blocks["constants"]["c0"] == pytest.approx(1.0)


def test_stage_selection(fixtures_dir):
    op = load_operator(fixtures_dir / "coupled.json")
    report = analyze(op, AnalysisOptions(stages=[Stage.INTERPOLATION]))
    assert report.stages_run == ["dissipativity", "resolvent", "interpolation"]
    assert report.semigroup == {} and report.blocks == {}
    report = analyze(op, AnalysisOptions(stages=[Stage.SEMIGROUP], sides=["plus"]))
    assert report.stages_run == ["dissipativity", "resolvent", "dichotomy", "semigroup"]
    assert set(report.semigroup) == {"plus", "definiteness"}


# ============================================================================
# Emission
# ============================================================================


def test_report_json_round_trip(fixtures_dir, tmp_path):
    report = analyze(load_operator(fixtures_dir / "coupled.json"))
    path = tmp_path / "out" / "report.json"
    text = emit(report, "json", path)
    assert path.read_text(encoding="utf-8") == text
    assert text.endswith("\n")
    loaded = load_report(path)
    assert emit(loaded, "json") == text


def test_report_non_finite_values_round_trip(fixtures_dir, tmp_path):
    report = analyze(load_operator(fixtures_dir / "axis.json"))
    assert report.resolvent["c_2_19"] == np.inf
    path = tmp_path / "axis-report.json"
    text = emit(report, "json", path)
    assert '"c_2_19": Infinity' in text
    assert load_report(path).resolvent["c_2_19"] == np.inf
    assert "Infinity" in json.loads(SCHEMA_FILE.read_text(encoding="utf-8"))["description"]


def test_floats_reload_exactly():
    values = [0.1 + 0.2, 1.0 / 3.0, np.float64(2.0) ** -1074, 1e308, -np.pi, np.nextafter(1.0, 2.0)]
    loaded = json.loads(dumps({"values": values}))["values"]
    assert all(a == float(b) for a, b in zip(loaded, values))
    assert all(len(repr(a).replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 17 for a in loaded)


def test_emit_rejects_unknown_formats(fixtures_dir):
    report = analyze(load_operator(fixtures_dir / "diag.json"), AnalysisOptions(stages=[]))
    with pytest.raises(InvalidParams):
        emit(report, "csv")
    with pytest.raises(InvalidParams):
        emit(report, "xml")


def test_schema_file_matches_model():
    declared = json.loads(SCHEMA_FILE.read_text(encoding="utf-8"))
    generated = AnalysisReport.model_json_schema()
    assert set(declared["properties"]) == set(generated["properties"])
    assert set(declared["required"]) == set(generated["required"])
    certificate = generated["$defs"]["Certificate"]["properties"]
    assert set(declared["$defs"]["Certificate"]["properties"]) == set(certificate)


# ============================================================================
# Sweeps
# ============================================================================


def test_parse_grid():
    np.testing.assert_allclose(parse_grid("0:1:5"), [0.0, 0.25, 0.5, 0.75, 1.0])
    np.testing.assert_allclose(parse_grid("0.1, 0.2"), [0.1, 0.2])
    assert parse_grid("").size == 0
    with pytest.raises(InvalidParams):
        parse_grid("a:b:c")


def test_sweep_empty_grid():
    frame = sweep("coupled_pair", [])
    assert frame.empty
    assert list(frame.columns) == list(SWEEP_COLUMNS)


def test_sweep_records_failures():
    logger.info("\n[TEST 4] Sweep with an invalid grid point\n")
    frame = sweep("coupled_pair", [0.5, 1.5], n_jobs=1)
    assert list(frame["value"]) == [0.5, 1.5]
    good, bad = frame.iloc[0], frame.iloc[1]
    assert good["reason"] == ""
    assert good["contour_schur_residual"] < 1e-6
    assert good["delta_plus"] > 0
    assert bad["reason"].startswith("InvalidParams")
    assert np.isinf(bad["c_2_4"]) and np.isinf(bad["delta_plus"])
    csv = emit(frame, "csv")
    assert csv.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    assert "inf" in csv.splitlines()[2]
    logger.info("✓ Failed point kept with inf and a reason")


def test_sweep_is_deterministic():
    first = sweep("uniform", [0.5, 1.0], seed=7, n_jobs=1)
    second = sweep("uniform", [0.5, 1.0], seed=7, n_jobs=2)
    pd.testing.assert_frame_equal(first, second)
    assert emit(first, "csv") == emit(second, "csv")


# ============================================================================
# Command line
# ============================================================================


def test_cli_exit_codes(fixtures_dir, tmp_path):
    logger.info("\n[TEST 5] CLI exit codes\n")
    out = tmp_path / "coupled-report.json"
    assert main(["analyze", str(fixtures_dir / "coupled.json"), "--out", str(out)]) == EXIT_OK
    assert load_report(out).passed
    assert main(["analyze", str(fixtures_dir / "axis.json"), "--out", str(tmp_path / "a.json")]) == EXIT_FAILED
    assert main(["analyze", str(fixtures_dir / "axis.json"), "--deflate",
                 "--out", str(tmp_path / "b.json")]) == EXIT_OK
    assert main(["analyze", str(tmp_path / "missing.json")]) == EXIT_INPUT
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert main(["dichotomy", str(broken)]) == EXIT_INPUT
    logger.info("✓ 0 / 1 / 2")


def test_cli_subcommands(fixtures_dir, tmp_path):
    coupled = str(fixtures_dir / "coupled.json")
    assert main(["dichotomy", coupled, "--method", "schur", "--out", str(tmp_path / "d.json")]) == EXIT_OK
    assert main(["interp", coupled, "--identity", "tower", "--out", str(tmp_path / "i.json")]) == EXIT_OK
    interp = load_report(tmp_path / "i.json")
    assert set(interp.interpolation) == {"tower"}
    assert main(["semigroup", coupled, "--subspace", "minus", "--T", "5",
                 "--out", str(tmp_path / "s.json")]) == EXIT_OK
    assert load_report(tmp_path / "s.json").semigroup["minus"]["energy"]["T"] == 5.0


def test_cli_generate_then_analyze(tmp_path):
    path = tmp_path / "gen.json"
    assert main(["generate", "--kind", "coupled_pair", "--param", "a=0.6", "--seed", "1",
                 "--out", str(path)]) == EXIT_OK
    op = load_operator(path)
    np.testing.assert_allclose(op.L, [[-1.0, 0.6], [-0.6, 1.0]])
    assert main(["analyze", str(path), "--out", str(tmp_path / "r.json")]) == EXIT_OK
    assert main(["generate", "--kind", "coupled_pair", "--param", "a=2"]) == EXIT_INPUT


def test_cli_sweep_and_strict(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--family", "coupled_pair", "--grid", "", "--out", str(out)]) == EXIT_OK
    assert out.read_text(encoding="utf-8").strip() == ",".join(SWEEP_COLUMNS)
    assert main(["sweep", "--family", "coupled_pair", "--grid", "0.5,1.5", "--jobs", "1",
                 "--out", str(tmp_path / "s.csv")]) == EXIT_FAILED
    before = config.TOL_VERIFY
    assert main(["--strict", "sweep", "--family", "coupled_pair", "--grid", "0.2", "--jobs", "1",
                 "--format", "json", "--out", str(tmp_path / "s.json")]) == EXIT_OK
    assert config.TOL_VERIFY == before
    rows = json.loads((tmp_path / "s.json").read_text(encoding="utf-8"))["rows"]
    assert rows[0]["value"] == 0.2


@pytest.mark.parametrize("alias,kind", [("2.6", "tower"), ("2.9", "shifted"), ("2.10", "f-scale")])
def test_cli_numbered_identity_aliases(fixtures_dir, tmp_path, alias, kind):
    out = tmp_path / f"interp-{alias}.json"
    assert main(["interp", str(fixtures_dir / "coupled.json"), "--identity", alias, "--out", str(out)]) == EXIT_OK
    assert set(load_report(out).interpolation) == {kind}
