"""Command-line interface tests, run in-process through main(argv)."""

import json
import math

from chgeom import ModelParams, SubmanifoldSpec, catalog_germ
from chgeom.cli import SWEEP_COLUMNS, main
from chgeom.jacobi import special_radius


def test_verify_model(capsys):
    code = main(["verify-model", "--n", "2", "--c", "-4", "--samples", "50"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.strip().endswith("PASS")


def test_construct_writes_spec(tmp_path, capsys):
    out_path = tmp_path / "spec.json"
    code = main([
        "construct", "--n", "3", "--c", "-4", "--k", "2",
        "--output", str(out_path),
    ])
    assert code == 0
    payload = json.loads(out_path.read_text())
    spec = SubmanifoldSpec.from_json_dict(payload)
    assert spec.k == 2
    assert spec.tangent_basis.shape == (4, 6)
    out = capsys.readouterr().out
    assert "shape-form resid" in out and out.strip().endswith("PASS")


def test_construct_rejects_large_k(capsys):
    code = main(["construct", "--n", "3", "--c", "-4", "--k", "3"])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_sweep_deterministic(tmp_path):
    args = [
        "sweep", "--n", "3", "--c", "-4", "--k", "2",
        "--r-min", "0.2", "--r-max", "1.0", "--count", "5",
    ]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == SWEEP_COLUMNS
    assert len(lines) == 6


def test_sweep_special_radius_row(tmp_path):
    rstar = special_radius(-4.0)
    out = tmp_path / "s.csv"
    code = main([
        "sweep", "--n", "3", "--c", "-4", "--k", "2",
        "--r-min", repr(rstar - 0.1), "--r-max", repr(rstar),
        "--count", "3", "--output", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    header = lines[0].split(",")
    last = lines[-1].split(",")
    row = dict(zip(header, last))
    assert row["g"] == "3"
    assert row["lambda4"] == "nan"
    assert row["mult4"] == "0"
    assert row["mult2"] == "2"  # merged lambda_2 = lambda_4 block
    assert row["classify_status"] == "G3_KBIG"
    # interior rows stay generic
    first = dict(zip(header, lines[1].split(",")))
    assert first["g"] == "4" and first["classify_status"] == "G4"
    # determinant column matches its closed form at the matched radius
    assert abs(float(row["detD"]) - float(row["detD_expected"])) < 1e-10


def test_sweep_rejects_bad_range(capsys):
    code = main([
        "sweep", "--n", "3", "--c", "-4", "--k", "2",
        "--r-min", "0.5", "--r-max", "0.2", "--count", "3",
    ])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_classify_germ_file(tmp_path, capsys):
    germ = catalog_germ(ModelParams(n=3, c=-4.0), 2, r=0.7)
    path = tmp_path / "germ.json"
    path.write_text(germ.to_json())
    code = main(["classify", "--input", str(path)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["model"] == "tube"
    assert payload["k"] == 2
    assert abs(payload["r"] - 0.7) < 1e-9


def test_classify_malformed_input(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"bad": 1}))
    assert main(["classify", "--input", str(path)]) == 2
    assert "malformed" in capsys.readouterr().err
    assert main(["classify", "--input", str(tmp_path / "missing.json")]) == 2


def test_residuals_suite(capsys):
    code = main([
        "residuals", "--n", "2", "--c", "-4", "--k", "1", "--r", "0.3",
    ])
    out = capsys.readouterr().out
    assert code == 0
    lines = [l for l in out.strip().splitlines() if l]
    assert all(l.endswith("PASS") for l in lines)
    names = {l.split()[0] for l in lines}
    assert {"gauss", "codazzi", "unit_pair_gauss"} <= names


def test_nonexistence_positive(capsys):
    code = main(["nonexistence", "--c", "4", "--grid", "30", "30", "30"])
    out = capsys.readouterr().out
    assert code == 0
    assert "feasible points          0" in out
    assert "certificate" in out


def test_nonexistence_negative_writes_curve(tmp_path, capsys):
    out_path = tmp_path / "curve.json"
    code = main([
        "nonexistence", "--c", "-4", "--grid", "40", "40", "40",
        "--output", str(out_path),
    ])
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["c"] == -4.0
    assert len(payload["curve_points"]) > 0
    row = payload["curve_points"][0]
    assert len(row) == 5 and all(math.isfinite(v) for v in row)


def test_no_command_exits_2():
    assert main([]) == 2


def test_unknown_command_exits_2():
    assert main(["frobnicate"]) == 2
