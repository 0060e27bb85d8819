# tests/test_cli.py
import csv
import math

import pytest

from curvebound.cli import (
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    PRESETS,
    CurveRequest,
    curve_rows,
    fmt,
    main,
)
from curvebound.errors import ParameterError


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_fmt():
    assert fmt(2.0) == "2"
    assert fmt(-0.0) == "0"
    assert fmt(0.1) == "0.1"
    assert fmt(1e-300) == "1e-300"
    assert fmt(True) == "true"
    assert fmt(False) == "false"


def test_phi_command(capsys):
    code, out, _ = run(capsys, "phi", "--rho", "1", "--t", "2", "--x", "1")
    assert code == EXIT_OK
    assert out == "0\n"


def test_phi_outside_domain(capsys):
    """Test dat een argument buiten het domein exit code 2 geeft."""
    code, out, err = run(capsys, "phi", "--rho", "1", "--t", "1", "--x", "20")
    assert code == EXIT_USAGE
    assert out == ""
    assert "CB011" in err
    assert repr(1.0 + math.pi**2) in err


def test_flat_harnack_command(capsys):
    code, out, _ = run(capsys, "harnack", "--n", "2", "--rho", "0", "--s", "1", "--t", "2", "--d", "1")
    assert code == EXIT_OK
    assert float(out) == pytest.approx(math.log(2.0) + 0.25, rel=1e-12)


def test_backward_harnack_is_rejected(capsys):
    code, _, err = run(capsys, "harnack", "--rho", "-1", "--s", "2", "--t", "1", "--d", "1")
    assert code == EXIT_USAGE
    assert "CB006" in err


def test_psi_and_legendre_commands(capsys):
    code, out, _ = run(capsys, "psi", "--rho", "0", "--n", "2", "--t", "1", "--x", "3")
    assert code == EXIT_OK
    assert out == "-2\n"
    code, out, _ = run(capsys, "legendre", "--rho", "0", "--n", "2", "--t", "1", "--x", "-0.5")
    assert code == EXIT_OK
    assert out == "value,argmax\n1,0\n"


def test_roots_command(capsys):
    code, out, _ = run(capsys, "roots", "--rho", "1", "--t", "2")
    assert code == EXIT_OK
    rows = dict(line.split(",") for line in out.strip().split("\n"))
    assert rows["name"] == "value"
    assert rows["xi2_below_one"] == "true"
    assert float(rows["xi1"]) < 0.0 < float(rows["xi2"])
    assert rows["xi2_bracket_valid"] == "false"


def test_negative_curvature_roots_command(capsys):
    code, out, _ = run(capsys, "roots", "--rho", "-1", "--t", "3")
    assert code == EXIT_OK
    rows = dict(line.split(",") for line in out.strip().split("\n"))
    assert float(rows["bracket_lo_absolute"]) <= float(rows["xi"]) <= float(rows["bracket_hi"])
    assert float(rows["bracket_lo_literal"]) > float(rows["bracket_hi"])
    assert float(rows["bracket_lo_squared"]) <= float(rows["bracket_lo_absolute"])


def test_compare_command(capsys, tmp_path):
    target = tmp_path / "compare.csv"
    code, out, _ = run(capsys, "compare", "--rho", "-1", "--t", "1", "--alpha", "2", "--out", str(target))
    assert code == EXIT_OK
    assert out == ""
    with target.open(encoding="utf-8", newline="") as stream:
        rows = list(csv.reader(stream))
    assert rows[0] == ["scenario", "label", "min_margin", "argmin", "tolerance", "extrapolated", "passed"]
    assert rows[1][0] == "rho=-1,t=1"
    labels = [row[1] for row in rows[1:]]
    assert "davies(alpha=2)" in labels
    assert "yau" in labels


def test_compare_needs_negative_curvature(capsys):
    code, _, err = run(capsys, "compare", "--rho", "1", "--t", "1")
    assert code == EXIT_USAGE
    assert "CB012" in err


def test_usage_errors(capsys):
    assert main(["nonsense"]) == EXIT_USAGE
    assert main(["phi", "--rho", "abc"]) == EXIT_USAGE
    assert main(["--help"]) == EXIT_OK
    capsys.readouterr()


def test_curves_preset(capsys, tmp_path):
    target = tmp_path / "fig1.csv"
    code, _, _ = run(capsys, "curves", "--preset", "fig1", "--out", str(target))
    assert code == EXIT_OK
    lines = target.read_text(encoding="utf-8").strip().split("\n")
    assert lines[0] == "x,t=1.5,t=2,t=2.5"
    assert len(lines) == 1 + PRESETS["fig1"].samples
    assert lines[1].startswith("-3,")


def test_limit_column():
    rows = curve_rows(CurveRequest("phi", -1.0, 2.0, (1.0,), -3.0, 3.0, samples=7, limit=True))
    assert rows[0] == ["x", "t=1", "limit"]
    assert rows[1][0] == "-3"
    assert float(rows[1][2]) == pytest.approx(4.5)
    assert rows[-1][2] == ""


def test_psi_preset_covers_the_interval():
    rows = curve_rows(PRESETS["fig3"])
    assert rows[0] == ["x", "t=1"]
    assert float(rows[1][1]) == 0.0
    assert float(rows[-1][1]) == 0.0
    assert all(float(row[1]) <= 0.0 for row in rows[1:])


def test_curve_request_validation(capsys):
    with pytest.raises(ParameterError):
        CurveRequest("zeta", 1.0, 2.0, (1.0,))
    with pytest.raises(ParameterError):
        CurveRequest("phi", 1.0, 2.0, (1.0,), samples=1)
    code, _, err = run(capsys, "curves", "--which", "phi", "--rho", "1")
    assert code == EXIT_USAGE
    assert "--times" in err


def test_verify_command(capsys, tmp_path):
    scenario = tmp_path / "sphere.ini"
    scenario.write_text(
        "space = sphere\nn = 2\nN = 200\nrefinements = 2\nf0 = cosine:1,0.5\ntimes = 1\n",
        encoding="utf-8",
    )
    code, out, _ = run(capsys, "verify", "--config", str(scenario))
    assert code == EXIT_OK
    lines = out.strip().split("\n")
    assert lines[0].startswith("scenario,label")
    assert all(line.startswith("sphere,") for line in lines[1:])
    assert EXIT_FAILED == 1


def test_verify_needs_config(capsys):
    code, _, err = run(capsys, "verify")
    assert code == EXIT_USAGE
    assert "--config" in err
