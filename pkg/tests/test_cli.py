import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from torickgk import cli
from torickgk.errors import ConfigError, UnsupportedFormatForDim
from torickgk.polytope import build_polytope, sample_interior

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SQUARE = {"schema": 1, "polytope": {"normals": [[1, 0], [0, 1], [-1, 0], [0, -1]], "offsets": [0, 0, 1, 1]}}
CUBE = {"schema": 1, "polytope": {"normals": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]],
                                  "offsets": [0, 0, 0, 1, 1, 1]}}


def run(args, tmp_path=None, doc=None):
    if doc is not None:
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(doc))
        args = [args[0], "-c", str(path), *args[1:]]
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(args, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_cp2_curvature_constant():
    code, out, _ = run(["curvature", "-c", str(CONFIGS / "cp2.json")])
    assert code == 0
    lines = out.strip().splitlines()
    header = lines[0].split(",")
    assert header[:3] == ["mu1", "mu2", "u_gk"]
    u = np.array([float(r.split(",")[2]) for r in lines[1:]])
    assert len(u) > 0
    assert np.max(np.abs(u - 12.0)) <= 1e-9


def test_identities_pass():
    code, out, _ = run(["identities", "-c", str(CONFIGS / "square_c03.json")])
    assert code == 0
    assert json.loads(out)["verdict"] == "pass"


def test_compactify_negative_control():
    code, out, _ = run(["compactify", "-c", str(CONFIGS / "bad_double_guillemin.json")])
    assert code == 1
    rep = json.loads(out)
    assert rep["verdict"] == "fail"
    assert rep["witnesses"][0]["condition"] == "C1"


def test_compactify_pass_and_c3_control():
    assert run(["compactify", "-c", str(CONFIGS / "square_c03.json")])[0] == 0
    code, out, _ = run(["compactify", "-c", str(CONFIGS / "cube_c3_control.json")])
    assert code == 1
    assert json.loads(out)["conditions"]["C3"]["passed"] is False


def test_check_polytope(tmp_path):
    code, out, _ = run(["check-polytope", "-c", str(CONFIGS / "hirzebruch.json")])
    assert code == 0
    assert len(json.loads(out)["conditions"]["delzant"]["vertices"]) == 4
    doc = {**SQUARE, "potential": {"kind": "expression", "src": "-mu1^2-mu2^2"}}
    code, out, _ = run(["check-polytope"], tmp_path, doc)
    assert code == 1
    assert json.loads(out)["witnesses"]


def test_convexity_pivot_override(tmp_path):
    # a nearly flat quadratic: its relative pivot sits between the default and the override
    doc = {**SQUARE, "potential": {"kind": "quadratic", "Q": [[1, 0], [0, 1e-6]]}}
    assert run(["check-polytope"], tmp_path, doc)[0] == 0
    doc["tolerances"] = {"convexity_pivot": 1e-4}
    assert run(["check-polytope"], tmp_path, doc)[0] == 1


def test_deform_and_extremal():
    code, out, _ = run(["deform", "-c", str(CONFIGS / "hirzebruch.json")])
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "t,max_u_gk_drift,p_min,p_max,admissible"
    assert all(r.endswith(",pass") for r in rows[1:])
    assert run(["extremal", "-c", str(CONFIGS / "cp2.json")])[0] == 0
    code, out, _ = run(["extremal", "-c", str(CONFIGS / "simplex_perturbed.json")])
    assert code == 1
    assert json.loads(out)["is_extremal"] is False


def test_deform_t_list_flag():
    code, out, _ = run(["deform", "-c", str(CONFIGS / "square_c03.json"), "--t-list", "0.5,2"])
    assert code == 0
    assert [r.split(",")[0] for r in out.strip().splitlines()[1:]] == ["0.5", "2"]


# ---------------------------------------------------------------- exit codes

@pytest.mark.parametrize("doc, fragment", [
    ({**SQUARE, "colour": "red"}, "colour"),
    ({**SQUARE, "schema": 2}, "schema"),
    ({"schema": 1}, "polytope"),
    ({**SQUARE, "potential": {"kind": "expression", "src": "mu1 +* 2"}}, "potential/src"),
    ({**SQUARE, "potential": {"kind": "expression", "src": "mu3"}}, "potential/src"),
    ({**SQUARE, "C": [[0, 1], [1, 0]]}, "antisymmetric"),
    ({**SQUARE, "grid": {"resolution": 0}}, "grid"),
    ({"schema": 1, "polytope": {"normals": [[1, 0], [0, 1], [-1, -2]], "offsets": [0, 0, 1]}}, "polytope"),
])
def test_config_errors_exit_2(tmp_path, doc, fragment):
    code, _, err = run(["curvature"], tmp_path, doc)
    assert code == 2
    assert fragment in err


def test_usage_errors_exit_2(tmp_path):
    assert run(["curvature"])[0] == 2  # missing -c
    assert run(["nonsense", "-c", "x.json"])[0] == 2
    assert run(["curvature", "-c", str(tmp_path / "missing.json")])[0] == 2
    (tmp_path / "bad.json").write_text("{not json")
    assert run(["curvature", "-c", str(tmp_path / "bad.json")])[0] == 2
    code, _, err = run(["curvature", "-c", str(CONFIGS / "cp2.json"), "--tol-scale", "-1"])
    assert code == 2


def test_numerical_error_exit_3(tmp_path):
    doc = {**SQUARE, "potential": {"kind": "quadratic", "Q": [[1, 0], [0, -1]]}}
    code, _, err = run(["curvature"], tmp_path, doc)
    assert code == 3
    assert "numerical error" in err


def test_pgm_needs_dimension_two(tmp_path):
    code, _, err = run(["curvature", "--format", "pgm", "--out", str(tmp_path / "x.pgm")], tmp_path, CUBE)
    assert code == 2
    assert not (tmp_path / "x.pgm").exists()
    with pytest.raises(UnsupportedFormatForDim):
        grid = sample_interior(build_polytope(*CUBE["polytope"].values()), 2, 0.1)
        cli.field_to_pgm(cli.ScalarField(grid, np.zeros(len(grid))))


# ---------------------------------------------------------------- output

def test_constant_field_pgm(tmp_path):
    doc = {**SQUARE, "grid": {"resolution": 3, "epsilon": 0.1}}
    out = tmp_path / "u.pgm"
    code, _, _ = run(["curvature", "--format", "pgm", "--out", str(out)], tmp_path, doc)
    assert code == 0
    data = out.read_bytes()
    header = b"P5\n3 3\n255\n"
    assert data.startswith(header)
    pixels = data[len(header):]
    assert len(pixels) == 9 and len(set(pixels)) == 1


def test_pgm_orientation():
    grid = sample_interior(build_polytope(*SQUARE["polytope"].values()), 2, 0.1)
    values = grid.points[:, 1]  # increases with mu2
    data = cli.field_to_pgm(cli.ScalarField(grid, values))
    pixels = np.frombuffer(data[len(b"P5\n2 2\n255\n"):], dtype=np.uint8).reshape(2, 2)
    np.testing.assert_array_equal(pixels, [[255, 255], [0, 0]])  # top row is high mu2


def test_csv_round_trip_bit_exact():
    grid = sample_interior(build_polytope(*SQUARE["polytope"].values()), 7, 0.01)
    rng = np.random.default_rng(0)
    values = rng.standard_normal(len(grid)) * 10.0 ** rng.integers(-300, 300, len(grid))
    pts, vals = cli.read_field_csv(cli.emit_field(cli.ScalarField(grid, values), "csv"))
    assert np.array_equal(vals, values)
    assert np.array_equal(pts, grid.points)


def test_json_field_output(tmp_path):
    doc = {**SQUARE, "grid": {"resolution": 4, "epsilon": 0.01}, "output": {"field": "u_gk"}}
    code, out, _ = run(["curvature", "--format", "json"], tmp_path, doc)
    assert code == 0
    assert np.allclose(json.loads(out)["values"]["u_gk"], 8.0)
    doc["output"]["field"] = "nope"
    assert run(["curvature", "--format", "pgm", "--out", str(tmp_path / "a.pgm")], tmp_path, doc)[0] == 2


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path / "outdir"))
    code, _, _ = run(["extremal", "-c", str(CONFIGS / "cp2.json"), "--out", "fit.json"])
    assert code == 0
    assert json.loads((tmp_path / "outdir" / "fit.json").read_text())["is_extremal"] is True
    absolute = tmp_path / "abs.json"
    assert run(["extremal", "-c", str(CONFIGS / "cp2.json"), "--out", str(absolute)])[0] == 0
    assert absolute.exists()


def test_seed_changes_sample(tmp_path):
    doc = {**SQUARE, "C": [[0, 0.3], [-0.3, 0]],
           "samples": {"points": 5, "oracle_points": 2, "first_order_points": 1}}
    a = run(["identities", "--seed", "1"], tmp_path, doc)[1]
    b = run(["identities", "--seed", "1"], tmp_path, doc)[1]
    c = run(["identities", "--seed", "2"], tmp_path, doc)[1]
    assert a == b and a != c


def test_unknown_format_rejected():
    with pytest.raises(ConfigError):
        cli.emit_field(None, "png")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "torickgk", "curvature", "-c", str(CONFIGS / "cp2.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("mu1,mu2,u_gk")
