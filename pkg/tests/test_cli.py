import json

import pytest
from click.testing import CliRunner

from stabthresh.cli import dumps, main
from stabthresh.curve import read_samples_csv
from stabthresh.threshold import ThresholdResult


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, list(args))

    return invoke


def test_threshold_odd_sphere(run):
    r = run("threshold", "--space", "odd_sphere(1)")
    assert r.exit_code == 0, r.output
    data = json.loads(r.output)
    assert data["value"] == pytest.approx(1.0, abs=1e-9)
    assert data["integer"] == 1 and data["agrees"] is True


def test_threshold_projective(run):
    r = run("threshold", "--space", "cp(2)", "--no-bracket")
    assert json.loads(r.output)["integer"] == 2


def test_general_pair_needs_flag(run):
    r = run("threshold", "--P", "2t", "--Q", "1+t^2")
    assert r.exit_code == 2
    assert "degree-1" in r.output
    r = run("threshold", "--P", "2t", "--Q", "1+t^2", "--allow-general", "--no-bracket")
    assert r.exit_code == 0
    assert "warning" in r.output


def test_verify_exit_codes(run):
    r = run("verify", "--P", "2t", "--Q", "1+t^2", "--allow-general", "--q", "0.8")
    assert r.exit_code == 0
    r = run("verify", "--P", "2t", "--Q", "1+t^2", "--allow-general", "--q", "1")
    assert r.exit_code == 1
    body = r.output[r.output.index("{"):]
    v = json.loads(body)["violation"]
    assert (v["q"], v["t"], v["equality"]) == (1.0, 1.0, True)


def test_parse_error_position(run):
    r = run("threshold", "--P", "t^2+", "--Q", "1+t^2")
    assert r.exit_code == 2
    assert "position 4" in r.output
    r = run("threshold", "--space", "cp(2")
    assert r.exit_code == 2 and "position 4" in r.output


def test_domain_errors(run):
    assert run("threshold", "--space", "S3", "--epsilon", "0").exit_code == 2
    assert run("threshold", "--space", "S3", "--tol", "1e-9").exit_code == 2
    assert run("lambert", "--branch", "-1", "--z", "1").exit_code == 2
    assert run("mhp", "--space", "S4").exit_code == 2


def test_bracket(run):
    data = json.loads(run("bracket", "--space", "S2").output)
    assert 2 < data["lo"] <= data["hi"] < 2.5


def test_curve_csv_and_sidecar(run, tmp_path):
    side = tmp_path / "meta.json"
    r = run("curve", "--space", "S2", "--format", "csv", "--count", "5", "--sidecar", str(side))
    assert r.exit_code == 0
    rows = read_samples_csv(r.output.splitlines())
    assert rows[0] == (1.0, pytest.approx(2.0))
    meta = json.loads(side.read_text())
    assert meta["limit"]["exact"] == "3/2"
    assert meta["critical_points"]


def test_mhp(run):
    r = run("mhp", "--space", "cp(1)")
    assert json.loads(r.output)["value"] == 3
    r = run("mhp", "--space", "cp(2)", "--q", "2", "--hi", "5", "--grid", "24")
    assert r.exit_code == 0 and json.loads(r.output)["heuristic"] is True
    r = run("mhp", "--space", "cp(1)", "--q", "2", "--hi", "5", "--grid", "24")
    assert r.exit_code == 1
    r = run("mhp", "--space", "arrangement(1)", "--q", "1", "--hi", "5", "--grid", "24")
    assert r.exit_code == 0


def test_check(run):
    assert run("check", "--space", "cp(3)").exit_code == 0
    r = run("check", "--odd", "3", "--betti", "1,0,0,0,1")
    assert r.exit_code == 1
    assert json.loads(r.output)["fh"]["checks"]["b"]["pass"] is False
    assert run("check", "--odd", "2", "--betti", "1").exit_code == 2


def test_lambert(run):
    data = json.loads(run("lambert", "--branch", "0", "--z", "2.718281828459045").output)
    assert data["w"] == pytest.approx(1.0, abs=1e-15)


def test_catalog(run):
    r = run("catalog", "--format", "csv")
    assert r.exit_code == 0
    assert r.output.splitlines()[0] == "space,homotopy,cohomology,mixed_hodge"


def test_text_format(run):
    r = run("threshold", "--space", "S3", "--no-bracket", "--format", "text")
    assert "integer: 1" in r.output.splitlines()


def test_determinism(run):
    a = run("threshold", "--space", "cp(3)")
    b = run("threshold", "--space", "cp(3)")
    assert a.output == b.output


def test_json_round_trip(run):
    data = json.loads(run("threshold", "--space", "S2").output)
    res = ThresholdResult.from_json(data)
    assert res.value == data["value"] and res.certified_bracket == tuple(data["bracket"])
    again = json.loads(dumps(res.to_json()))
    assert again == res.to_json()


def test_dumps_uses_17_digits():
    assert dumps(0.1) == "0.10000000000000001"
    assert dumps({"b": 1.0, "a": float("inf")}) == '{\n  "a": null,\n  "b": 1.0\n}'
