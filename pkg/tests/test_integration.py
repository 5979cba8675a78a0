"""
End-to-end runs of the ncft command line.

Every test goes through ncft.main.run, the same entry point as the console
script, and reads back the JSON or CSV it wrote. Run with:
    pytest -m integration tests/test_integration.py
"""

import csv
import json

import numpy as np
import pytest

from ncft.main import run
from ncft.models.space import OperatorSpaceDesc
from ncft.services.fourier import random_function
from ncft.services.groups import build_group
from ncft.services.representations import irreps_catalog


def _read(path):
    return json.loads(path.read_text())


@pytest.mark.integration
def test_verify_plancherel(tmp_path):
    """100 Plancherel trials on S3 all verify"""
    out = tmp_path / "report.json"
    code = run(["verify", "--group", "S3", "--suite", "plancherel", "--trials", "100", "--seed", "1", "--out", str(out)])

    assert code == 0
    report = _read(out)
    assert report["checks"][0]["counts"]["verified"] == 100
    assert report["config"]["seed"] == 1
    assert report["config"]["flags"]["p2"] == "inf"
    print(f"✅ Plancherel: {report['checks'][0]['counts']}")


@pytest.mark.integration
def test_verify_vector_valued(tmp_path):
    """Hausdorff-Young on Q8 with Schatten(2, 2) values reports no violation"""
    out = tmp_path / "report.json"
    code = run([
        "verify", "--group", "Q8", "--suite", "hy,invhy", "--p", "4/3", "--E", "schatten:2:2",
        "--trials", "3", "--restarts", "1", "--iterations", "30", "--out", str(out),
    ])

    assert code == 0
    report = _read(out)
    assert [check["check"] for check in report["checks"]] == ["hy", "invhy"]
    assert all(check["counts"]["violated"] == 0 for check in report["checks"])


@pytest.mark.integration
def test_verify_is_deterministic(tmp_path):
    """Same seed, same verdicts"""
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    args = ["verify", "--group", "D4", "--suite", "hy", "--p", "1.5", "--trials", "10", "--seed", "3"]

    assert run(args + ["--out", str(first)]) == 0
    assert run(args + ["--out", str(second)]) == 0
    assert _read(first)["checks"] == _read(second)["checks"]


@pytest.mark.integration
def test_estimate_type(tmp_path):
    """The type constant at p = 1 is 1 and lands in the CSV with its bound"""
    out, rows = tmp_path / "estimate.json", tmp_path / "estimate.csv"
    code = run([
        "estimate", "type", "--group", "Q8", "--E", "scalar", "--p", "1", "--level", "1",
        "--budget", "10", "--trials", "3", "--out", str(out), "--csv", str(rows),
    ])

    assert code == 0
    report = _read(out)
    assert report["estimates"][0]["value"] == pytest.approx(1.0, abs=1e-9)
    assert report["bounds"]["flagged"] == 0
    with open(rows, newline="") as handle:
        table = list(csv.DictReader(handle))
    assert table[0]["group"] == "Q8"
    assert table[0]["kind"] == "type"
    assert table[0]["bound"] == "1"
    print(f"✅ Type constant: {report['estimates'][0]['value']}")


@pytest.mark.integration
def test_group_show(capsys):
    """Without --out the summary goes to stdout"""
    assert run(["group", "show", "--spec", "Q8"]) == 0

    payload = json.loads(capsys.readouterr().out)
    assert payload["order"] == 8
    assert payload["class_sizes"] == [1, 1, 2, 2, 2]
    assert payload["validation"]["passed"] is True


@pytest.mark.integration
@pytest.mark.parametrize("argv", [
    ["group", "show", "--spec", "nonsense"],
    ["verify", "--group", "S3", "--bogus"],
    ["verify", "--group", "S3", "--suite", "hy", "--p", "3", "--trials", "1"],
    ["verify", "--group", "S3", "--suite", "teleport"],
    ["verify", "--group", "S3", "--E", "schatten:0:2"],
    ["estimate", "type", "--group", "S3", "--p", "1", "--level", "9"],
    ["fourier", "forward", "--in", "/nonexistent/f.json"],
])
def test_input_errors(argv):
    """Usage and input errors exit with 1"""
    assert run(argv) == 1


@pytest.mark.integration
def test_version():
    """--version exits cleanly"""
    assert run(["--version"]) == 0


@pytest.mark.integration
def test_irreps_compute_and_validate(tmp_path):
    """A computed table validates; dropping an irrep fails validation"""
    table_path = tmp_path / "d4.json"
    assert run(["irreps", "compute", "--group", "D4", "--method", "numeric", "--seed", "5", "--out", str(table_path)]) == 0
    assert [irrep["degree"] for irrep in _read(table_path)["irreps"]] == [1, 1, 1, 1, 2]

    report_path = tmp_path / "validation.json"
    assert run(["irreps", "validate", "--group", "D4", "--table", str(table_path), "--out", str(report_path)]) == 0
    assert _read(report_path)["passed"] is True

    broken = _read(table_path)
    broken["irreps"] = broken["irreps"][:-1]
    broken_path = tmp_path / "broken.json"
    broken_path.write_text(json.dumps(broken))
    assert run(["irreps", "validate", "--group", "D4", "--table", str(broken_path), "--out", str(report_path)]) == 1
    assert _read(report_path)["checks"]["completeness"] is False


@pytest.mark.integration
def test_character_table(tmp_path):
    """--characters emits one row per irrep and one column per class"""
    out = tmp_path / "chars.json"
    assert run(["irreps", "compute", "--group", "S3", "--characters", "--out", str(out)]) == 0

    payload = _read(out)
    assert len(payload["classes"]) == 3
    assert np.asarray(payload["characters"]).shape == (3, 3, 2)


@pytest.mark.integration
def test_fourier_round_trip(tmp_path):
    """forward then inverse through files returns the original function"""
    group = build_group("S3")
    f = random_function(group, OperatorSpaceDesc.schatten(2, 1), np.random.default_rng(0))
    source, spectrum, restored = tmp_path / "f.json", tmp_path / "s.json", tmp_path / "g.json"
    source.write_text(json.dumps(f.to_json()))

    assert run(["fourier", "forward", "--in", str(source), "--out", str(spectrum)]) == 0
    assert [block["degree"] for block in _read(spectrum)["blocks"]] == [1, 1, 2]
    assert run(["fourier", "inverse", "--in", str(spectrum), "--out", str(restored)]) == 0

    values = np.asarray(_read(restored)["values"])
    assert np.allclose(values[..., 0] + 1j * values[..., 1], f.values)


@pytest.mark.integration
def test_suite_small_grid(tmp_path):
    """A small grid runs every requested check and estimate without flags"""
    out, rows = tmp_path / "suite.json", tmp_path / "suite.csv"
    code = run([
        "suite", "--groups", "Z4", "--exponents", "1,2", "--spaces", "scalar",
        "--checks", "plancherel,hy,holder", "--estimates", "type",
        "--trials", "5", "--estimate-trials", "2", "--budget", "6", "--level", "1",
        "--out", str(out), "--csv", str(rows),
    ])

    assert code == 0
    report = _read(out)
    assert [check["check"] for check in report["checks"]] == ["plancherel", "hy", "hy", "holder", "holder"]
    assert len(report["estimates"]) == 2
    assert report["errors"] == []
    assert "Z4" in report["timing"]
    with open(rows, newline="") as handle:
        assert len(list(csv.DictReader(handle))) == 2


@pytest.mark.integration
def test_suite_empty_grid(tmp_path):
    """No groups gives an empty report and exit 0"""
    out = tmp_path / "suite.json"
    assert run(["suite", "--groups", "", "--checks", "hy", "--estimates", "", "--out", str(out)]) == 0
    report = _read(out)
    assert report["checks"] == []
    assert report["estimates"] == []


@pytest.mark.integration
def test_suite_rejects_exponent(tmp_path):
    """p = 3 with Hausdorff-Young checks is an input error"""
    assert run(["suite", "--groups", "Z4", "--exponents", "3", "--checks", "hy", "--out", str(tmp_path / "r.json")]) == 1


@pytest.mark.integration
def test_suite_config_file(tmp_path):
    """Grid fields come from --config and flags override them"""
    config = tmp_path / "grid.json"
    config.write_text(json.dumps({
        "groups": ["Z3", "not-a-group"],
        "exponents": ["4/3"],
        "spaces": ["scalar"],
        "checks": ["invhy"],
        "estimates": [],
        "trials": 50,
    }))
    out = tmp_path / "suite.json"
    code = run(["suite", "--config", str(config), "--trials", "4", "--out", str(out)])

    # the bad group is recorded and the rest of the grid still runs
    assert code == 1
    report = _read(out)
    assert report["checks"][0]["trials"] == 4
    assert report["checks"][0]["p"] == pytest.approx(4 / 3)
    assert len(report["errors"]) == 1


def _write_function(path, spec, space=None):
    f = random_function(build_group(spec), space or OperatorSpaceDesc.scalar(), np.random.default_rng(0))
    path.write_text(json.dumps(f.to_json()))


@pytest.mark.integration
def test_table_from_other_group(tmp_path, capsys):
    """A Z2xZ2 table is refused for a function on Z4"""
    table_path, source = tmp_path / "t.json", tmp_path / "f.json"
    assert run(["irreps", "compute", "--group", "Z2xZ2", "--out", str(table_path)]) == 0
    _write_function(source, "Z4")

    assert run(["fourier", "forward", "--in", str(source), "--table", str(table_path)]) == 1
    assert "GroupMismatch" in capsys.readouterr().err


@pytest.mark.integration
def test_invalid_table_refused(tmp_path, capsys):
    """A table failing validation is an input error for verify, estimate and fourier"""
    payload = irreps_catalog(build_group("D4")).to_json()
    payload["irreps"][-1]["matrices"] = (np.asarray(payload["irreps"][-1]["matrices"]) * 1.01).tolist()
    table_path, source = tmp_path / "scaled.json", tmp_path / "f.json"
    table_path.write_text(json.dumps(payload))
    _write_function(source, "D4")

    assert run(["verify", "--group", "D4", "--table", str(table_path), "--suite", "plancherel", "--trials", "1"]) == 1
    assert run(["estimate", "type", "--group", "D4", "--table", str(table_path), "--p", "1", "--level", "1"]) == 1
    assert run(["fourier", "forward", "--in", str(source), "--table", str(table_path)]) == 1
    assert "unitarity" in capsys.readouterr().err


@pytest.mark.integration
def test_valid_table_file(tmp_path):
    """A table written by irreps compute is accepted by fourier forward"""
    table_path, source, out = tmp_path / "t.json", tmp_path / "f.json", tmp_path / "s.json"
    assert run(["irreps", "compute", "--group", "Q8", "--out", str(table_path)]) == 0
    _write_function(source, "Q8")

    assert run(["fourier", "forward", "--in", str(source), "--table", str(table_path), "--out", str(out)]) == 0
    assert [block["degree"] for block in _read(out)["blocks"]] == [1, 1, 1, 1, 2]


@pytest.mark.integration
@pytest.mark.parametrize("command,content", [
    (["fourier", "forward", "--in"], "{not json"),
    (["fourier", "forward", "--in"], "[1, 2, 3]"),
    (["fourier", "inverse", "--in"], '{"group": "Z3", "blocks": [{"pi": 0}]}'),
    (["fourier", "forward", "--in"], '{"group": "Z3", "values": [[1, 0], [2]]}'),
    (["irreps", "validate", "--in"], '{"group": "Z3", "irreps": [{"matrices": []}]}'),
    (["irreps", "validate", "--in"], '{"irreps": []}'),
    (["suite", "--config"], '["Z4"]'),
    (["suite", "--config"], "{"),
])
def test_malformed_files(tmp_path, capsys, command, content):
    """Malformed input files exit 1 with a message instead of a traceback"""
    path = tmp_path / "input.json"
    path.write_text(content)

    assert run(command + [str(path), "--out", str(tmp_path / "out.json")]) == 1
    assert "ncft:" in capsys.readouterr().err


@pytest.mark.integration
def test_irreps_validate_in(tmp_path):
    """validate --in takes the group from the file; --group cross-checks it"""
    table_path, report_path = tmp_path / "s4.json", tmp_path / "report.json"
    assert run(["irreps", "compute", "--group", "S4", "--out", str(table_path)]) == 0

    assert run(["irreps", "validate", "--in", str(table_path), "--out", str(report_path)]) == 0
    assert _read(report_path)["passed"] is True
    assert run(["irreps", "validate", "--in", str(table_path), "--group", "S4", "--out", str(report_path)]) == 0
    assert run(["irreps", "validate", "--in", str(table_path), "--group", "Z24", "--out", str(report_path)]) == 1
