import csv
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from tclab.cli import main

SAKANE = "d=2,b=1/2,a=1;d=2,b=-1/2,a=1"

COMMANDS = [
    ["curvature", "--catalog", "cp2"],
    ["curvature", "--catalog", "blowup1", "--param", "a=1", "--extremal"],
    ["curvature", "--catalog", "sakane6", "--einstein", "1", "--points", "0,0,0;1/3,-1/2,1/4"],
    ["curvature", "--catalog", "cp2", "--einstein", "2"],
    ["extremal", "--fiber", "d=2,b=1/2,a=1", "--interval", "-1,1"],
    ["extremal", "--fiber", SAKANE, "--einstein", "1"],
    ["extremal", "--fiber", "d=2,b=-1/2,a=(a+1)/2;d=2,b=1/2,a=(c+1)/2", "--csc"],
    ["hermitian", "--family", "hirzebruch", "--q", "-1", "--l", "0"],
    ["hermitian", "--family", "hirzebruch", "--q", "-2", "--l", "0"],
    ["hermitian", "--profile", "d=2,quad(1,1,3/16),b=1/2", "--beta", "0"],
    ["futaki", "--polytope", "hexagon"],
    ["futaki", "--polytope", "blowup1", "--param", "a=1"],
    ["futaki", "--fiber", SAKANE],
    ["diag", "--orbit", "stiefel:4"],
    ["diag", "--orbit", "flag:2,2"],
    ["diag", "--orbit", "su3u1"],
    ["t2", "--example", "s4", "--grid", "16"],
    ["t2", "--example", "s2xs2", "--check", "bolts"],
    ["t2", "--example", "s4", "--check", "gravity"],
    ["t2", "--example", "s4-iso", "--check", "rhoq", "--grid", "8"],
    ["t2", "--orbit", "(0,1);(1,1);(0,1);(1,0)", "--invariants"],
]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def schema(name):
    return json.loads(resources.files("tclab").joinpath("schemas", f"{name}.json").read_text())


@pytest.mark.parametrize("argv", COMMANDS, ids=[" ".join(c[:3]) for c in COMMANDS])
def test_reports_validate_and_repeat(argv, capsys):
    code, out = run(argv, capsys)
    assert code in (0, 1)
    report = json.loads(out)
    jsonschema.validate(report, schema(argv[0]))
    assert report["status"] == ("pass" if code == 0 else "fail")
    assert "wall_time" not in report
    code2, out2 = run(argv, capsys)
    assert (code2, out2) == (code, out)


def test_futaki_hexagon(capsys):
    code, out = run(["futaki", "--polytope", "hexagon"], capsys)
    assert code == 0
    assert json.loads(out)["results"]["futaki"] == ["0/1", "0/1"]


def test_extremal_example(capsys):
    code, out = run(["extremal", "--fiber", "d=2,b=1/2,a=1", "--interval", "-1,1"], capsys)
    res = json.loads(out)["results"]
    assert code == 0
    assert (res["alpha"], res["beta"]) == ("12/11", "42/11")


def test_diag_flag(capsys):
    code, out = run(["diag", "--orbit", "flag:2,2"], capsys)
    assert code == 0
    assert "not diagonalizable by this method" in out


@pytest.mark.parametrize("argv", [
    ["curvature", "--catalog", "cp2", "--einstein", "2"],
    ["hermitian", "--family", "hirzebruch", "--q", "-2", "--l", "0"],
    ["t2", "--example", "s2xs2-scaled", "--grid", "8"],
])
def test_failed_check_exit_one(argv, capsys):
    assert run(argv, capsys)[0] == 1


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["futaki", "--bogus"],
    [],
    ["diag", "--orbit", "g2"],
    ["curvature", "--catalog", "nope"],
    ["extremal", "--fiber", "d=2,b=1,a=1/2"],
    ["extremal", "--fiber", "d=3,b=1,a=1"],
    ["t2", "--orbit", "(2,0);(0,1)", "--invariants"],
])
def test_invalid_input_exit_two(argv, capsys):
    assert main(argv) == 2


def test_timing_flag(capsys):
    code, out = run(["--timing", "futaki", "--polytope", "cp2"], capsys)
    assert code == 0 and "wall_time" in json.loads(out)


def test_json_output_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, out = run(["--json", str(path), "diag", "--orbit", "su2"], capsys)
    assert code == 0
    assert path.read_text() == out


def test_console_entry_point_identical():
    argv = [sys.executable, "-m", "tclab.cli", "extremal", "--fiber", SAKANE, "--einstein", "1"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestCsv:
    def test_sakane_constant_scalar(self, tmp_path, capsys):
        path = tmp_path / "s.csv"
        code, _ = run(["extremal", "--fiber", SAKANE, "--einstein", "1", "--csv", str(path)], capsys)
        rows = read_csv(path)
        assert code == 0
        assert rows[0][:3] == ["x", "h", "S"]
        assert len(rows) == 102
        assert all(float(r[2]) == 6 for r in rows[1:])

    def test_blowup_affine_scalar(self, tmp_path, capsys):
        path = tmp_path / "b.csv"
        code, _ = run(["extremal", "--fiber", "d=2,b=-1/2,a=1", "--csv", str(path), "--samples", "21"], capsys)
        rows = read_csv(path)
        assert code == 0 and len(rows) == 22
        for r in rows[1:]:
            x = float(r[0])
            assert float(r[2]) == pytest.approx(-12 * x / 11 + 42 / 11, rel=1e-14)

    def test_fifteen_digits(self, tmp_path, capsys):
        path = tmp_path / "d.csv"
        run(["extremal", "--fiber", "d=2,b=-1/2,a=1", "--csv", str(path), "--samples", "4"], capsys)
        assert read_csv(path)[2][2] == f"{-12 * (-1 / 3) / 11 + 42 / 11:.15g}"

    def test_empty_grid(self, tmp_path, capsys):
        path = tmp_path / "e.csv"
        code, _ = run(["extremal", "--fiber", SAKANE, "--einstein", "1", "--csv", str(path), "--samples", "0"],
                      capsys)
        assert code == 0
        assert path.read_text() == "x,h,S,A_1,A_2\n"

    def test_unwritable(self, tmp_path, capsys):
        path = tmp_path / "missing" / "x.csv"
        assert main(["extremal", "--fiber", SAKANE, "--csv", str(path)]) == 2

    def test_potential_samples(self, tmp_path, capsys):
        path = tmp_path / "p.csv"
        code, _ = run(["curvature", "--catalog", "cp2", "--csv", str(path)], capsys)
        rows = read_csv(path)
        assert code == 0 and rows[0] == ["x", "y", "S"]
        # same constant as the exact cp2 scalar curvature test
        assert len(rows) > 1 and all(float(r[2]) == 4 for r in rows[1:])
