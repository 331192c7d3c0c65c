import json
import math
import subprocess
import sys

import pytest

from gtcone import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_gt_residual_on_sphere_harmonic(capsys):
    code, doc = run_json(capsys, "check", "round_sphere:2+harmonic_deg2", "gt_residual", "--c", "1")
    assert code == 0 and doc["passed"]
    (rep,) = doc["reports"]
    assert rep["verdict"] == "pass" and rep["max_residual"] < 1e-9
    assert rep["points_sampled"] == 200 and rep["seed"] == 42


def test_constant_on_flat_with_c_zero(capsys):
    code, doc = run_json(capsys, "check", "flat:2,0", "gt_residual", "--alpha", "const", "--c", "0")
    assert code == 0 and doc["reports"][0]["max_residual"] == 0.0


def test_octant_holonomy(capsys):
    code, doc = run_json(capsys, "holonomy", "round_sphere:2", "--loop", "octant")
    assert code == 0
    (rep,) = doc["reports"]
    assert rep["extra"]["angle"] == pytest.approx(math.pi / 2, abs=1e-4)


def test_failing_check_exits_one(capsys):
    code, doc = run_json(capsys, "check", "round_sphere:2+harmonic_deg2", "obata_residual", "--points", "20")
    assert code == 1 and not doc["passed"] and doc["reports"][0]["verdict"] == "fail"


@pytest.mark.parametrize("argv", [
    ["check", "nowhere", "gt_residual"],
    ["check", "round_sphere:2", "no_such_check"],
    ["check", "round_sphere:2+missing", "gt_residual"],
    ["check", "round_sphere:1", "gt_residual"],
    ["check", "round_sphere:2", "gt_residual", "--steps", "4"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_two(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""


def test_same_seed_byte_identical(capsys):
    argv = ["check", "bumpy_sphere:2", "cone_curvature", "--points", "15"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    _, c, _ = run(capsys, *argv[:-1], "--seed", "7", "--points", "15")
    assert a != c


def test_timing_only_on_request(capsys):
    _, doc = run_json(capsys, "check", "flat:2,0", "gt_residual", "--alpha", "const", "--points", "5")
    assert "runtime_ms" not in doc["reports"][0]
    _, doc = run_json(capsys, "check", "flat:2,0", "gt_residual", "--alpha", "const", "--points", "5", "--timing")
    assert isinstance(doc["reports"][0]["runtime_ms"], int)


def test_floats_round_trip_exactly():
    for x in (0.1, 1 / 3, 1e-300, 2.0, 0.0, -7.25e19):
        assert float(json.loads(cli.dumps(x))) == x
    assert cli.dumps(2.0) == "2.0" and cli.dumps(0.1) == "0.10000000000000001"
    assert json.loads(cli.dumps({"a": float("nan")}))["a"] == "nan"


def test_parse_address():
    case_id, params, field = cli.parse_address("flat:1,1+x0")
    assert (case_id, params, field) == ("flat", {"p": 1, "q": 1}, "x0")
    case_id, params, field = cli.parse_address("bumpy_sphere:n=3,eps=0.2")
    assert params == {"n": 3, "eps": 0.2} and field is None
    with pytest.raises(cli.UsageError):
        cli.parse_address("flat:1,2,3")


def test_case_file_address(capsys, tmp_path):
    path = tmp_path / "disk.json"
    path.write_text(json.dumps({
        "id": "disk", "coordinates": ["x", "y"],
        "metric": [["1", "0"], ["0", "1"]],
        "scalars": {"lin": "0.5*x - y + 2"},
    }))
    code, doc = run_json(capsys, "check", f"{path}+lin", "gt_residual", "--c", "0", "--points", "10")
    assert code == 0 and doc["reports"][0]["case_id"] == "disk"
    assert doc["reports"][0]["max_residual"] == 0.0


def test_text_format(capsys):
    code, out, _ = run(capsys, "check", "round_sphere:3", "einstein_residual", "--points", "10",
                       "--format", "text")
    assert code == 0 and out.startswith("PASS") and "einstein" in out


@pytest.mark.parametrize("argv,code", [
    (["cone", "round_sphere:2+harmonic_deg2", "--points", "20"], 0),
    (["cone", "bumpy_sphere:2", "--points", "20"], 1),
    (["split", "round_sphere:2", "--points", "20", "--critical", "500"], 0),
    (["holonomy", "flat:2,0", "--loops", "2", "--steps", "64"], 0),
    (["mobility", "beltrami_pair:2", "--points", "20"], 0),
    (["matrices", "finite_group:o2xo2"], 0),
    (["matrices", "finite_group:binary_icosahedral"], 0),
    (["matrices", "m2r_determinant_space"], 0),
    (["check", "flat_torus+sin2pi", "gt_residual", "--c", "0", "--points", "50"], 1),
    (["check", "flat_torus+affine", "c0_parallel", "--points", "50"], 0),
    (["check", "sl3_projective_field:2", "basic1_residual", "--vector", "projective", "--points", "20"], 0),
    (["check", "round_sphere:2", "fd_crosscheck", "--points", "5"], 0),
])
def test_verbs(capsys, argv, code):
    got, doc = run_json(capsys, *argv)
    assert got == code, doc
    assert doc["passed"] is (code == 0)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gtcone", "check", "flat:2,0", "gt_residual", "--alpha", "const",
                           "--points", "3", "--format", "text"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("PASS")
