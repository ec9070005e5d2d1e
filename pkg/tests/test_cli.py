import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chyp import cli
from chyp._validation import THETA_MAX, THETA_MIN, check_angles, check_resolution, check_theta, parse_theta
from chyp.hermitian import hvec


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


@pytest.mark.parametrize("text,value", [
    ("5pi/6", 5 * np.pi / 6), ("pi", np.pi), ("0.9pi", 0.9 * np.pi), ("5*pi/6", 5 * np.pi / 6),
    ("2.75", 2.75), ("5π/6", 5 * np.pi / 6), (2.8, 2.8),
])
def test_parse_theta(text, value):
    assert parse_theta(text) == pytest.approx(value, abs=1e-15)


def test_parse_theta_rejects_garbage():
    with pytest.raises(ValueError):
        parse_theta("five")


def test_check_theta_snaps_rounded_endpoints():
    assert check_theta("2.61799") == THETA_MIN
    assert check_theta("3.1415927") == THETA_MAX
    # in-range values are kept as they are
    assert check_theta(THETA_MIN + 1e-6) == THETA_MIN + 1e-6


@pytest.mark.parametrize("bad", [2.0, 3.2, float("nan"), float("inf")])
def test_check_theta_rejects(bad):
    with pytest.raises(ValueError):
        check_theta(bad)


def test_check_resolution_and_angles():
    assert check_resolution(64) == 64
    with pytest.raises(ValueError):
        check_resolution(63)
    with pytest.raises(ValueError):
        check_angles([0.0, 1.0, 2.0], 2)
    with pytest.raises(ValueError):
        check_angles([0.0, np.nan], 2)


@given(st.one_of(st.floats(allow_nan=True), st.integers(), st.complex_numbers(), st.lists(st.floats(), max_size=3)))
def test_clean_is_json_safe(x):
    json.dumps(cli._clean({"x": x, "v": np.array([1.5, np.inf])}), allow_nan=False)


def test_clean_fixes_digits():
    assert cli._clean(1 / 3) == 0.333333333333
    assert cli._clean(np.float64(2.0)) == 2.0 and cli._clean(np.bool_(True)) is True


def test_verify_endpoint_json(capsys):
    code, out = run_cli(capsys, "verify", "--theta", "2.6179938779914944")
    assert code == 0
    d = json.loads(out)
    assert list(d)[:5] == ["theta", "relations", "verdicts", "ridge_cycles", "golden"]
    assert d["ok"] is True
    v = next(v for v in d["verdicts"] if v["pair"] == ["12", "23"])
    assert v["outcome"] == "empty" and abs(v["value"] - 12.752) < 0.05
    assert all(r["passed"] for r in d["golden"]) and len(d["golden"]) == 8


def test_verify_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["verify", "--theta", "0.9pi", "-o", str(a)]) == 0
    assert cli.main(["verify", "--theta", "0.9pi", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_text(capsys):
    code, out = run_cli(capsys, "verify", "--theta", "pi", "--format", "text")
    assert code == 0
    assert "result: PASS" in out and "klein" in out


def test_verify_certified(capsys):
    code, out = run_cli(capsys, "verify", "--theta", "5pi/6", "--mode", "certified")
    d = json.loads(out)
    assert code == 0 and d["ok"]
    v = next(v for v in d["verdicts"] if v["pair"] == ["12", "23"])
    assert v["mode"] == "certified" and v["detail"]["lower_bound"] > 0


def test_export_locus(capsys):
    code, out = run_cli(capsys, "export-locus", "--pair", "A1,A3", "--theta", "2.61799", "--slices", "180")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["r", "s", "re1", "im1", "re2", "im2", "re3", "im3", "re4", "im4"]
    assert len(rows) > 0
    for r in rows:
        v = hvec([float(r[f"re{k}"]) + 1j * float(r[f"im{k}"]) for k in range(1, 5)])
        assert abs(v.norm2()) < 1e-7


def test_export_locus_interior_theta(capsys, tmp_path):
    path = tmp_path / "locus.csv"
    assert cli.main(["export-locus", "--pair", "A1,A4^-1", "--theta", "0.9pi", "--slices", "90", "-o", str(path)]) == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) > 0
    for r in rows:
        v = hvec([float(r[f"re{k}"]) + 1j * float(r[f"im{k}"]) for k in range(1, 5)])
        assert abs(v.norm2()) < 1e-7 * max(1.0, np.abs(v.coords).max() ** 2)


def test_export_locus_help_documents_columns(capsys):
    with pytest.raises(SystemExit):
        cli.main(["export-locus", "--help"])
    assert "r,s,re1,im1,re2,im2,re3,im3,re4,im4" in capsys.readouterr().out


def test_sweep_without_bracket(capsys):
    code, out = run_cli(capsys, "sweep", "--from", "2.62", "--to", "3.1415926", "--steps", "12",
                        "--expect-bracket", "none")
    d = json.loads(out)
    assert code == 0
    assert len(d["transitions"]) == 1
    lo, hi = d["transitions"][0]["grid_bracket"]
    assert lo <= d["transitions"][0]["theta_star"] <= hi


def test_sweep_exit_code_follows_bracket(capsys):
    code, out = run_cli(capsys, "sweep", "--from", "2.62", "--to", "3.1415926", "--steps", "6",
                        "--expect-bracket", "2.60,2.65")
    assert code == 0
    code, out = run_cli(capsys, "sweep", "--from", "2.62", "--to", "3.1415926", "--steps", "6",
                        "--expect-bracket", "2.90,3.00")
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["verify", "--theta", "2.0"],
    ["verify", "--theta", "5pi/6", "--grid", "10"],
    ["export-locus", "--pair", "A1", "--theta", "pi"],
    ["export-locus", "--pair", "A1,A1", "--theta", "pi"],
    ["export-locus", "--pair", "A1,B2", "--theta", "pi"],
    ["sweep", "--from", "3.0", "--to", "2.7"],
    ["sweep", "--steps", "1"],
    ["sweep", "--expect-bracket", "x"],
    [],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2
