import csv
import json
import subprocess
import sys

import pytest

from ringcover.cli import FAILED, OK, USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_pack_then_verify(tmp_path, capsys):
    cell = tmp_path / "cell.json"
    code, out, _ = run(capsys, "pack", "--lambda", "1.5", "--out", str(cell), "--svg", str(tmp_path / "cell.svg"))
    assert code == OK
    assert json.loads(out)["n"] == 2
    assert (tmp_path / "cell.svg").exists()
    report = tmp_path / "report"
    code, out, _ = run(capsys, "verify", "--packing", str(cell), "--report", str(report))
    assert code == OK
    result = json.loads(out)
    assert result["disjoint"] and result["covering_certified"]
    for name in ("coverage.json", "coverage.csv", "verify.json", "cell.svg"):
        assert (report / name).exists()


def test_pack_rejects_lambda_below_one(capsys):
    code, _, err = run(capsys, "pack", "--lambda", "0.9")
    assert code == USAGE
    assert "lambda" in err


def test_pack_budget_exhausted(capsys):
    code, _, err = run(capsys, "pack", "--lambda", "1.1", "--max-tiles", "1000")
    assert code == FAILED
    assert "budget" in err


def test_verify_reports_uncovered(tmp_path, capsys):
    cell = tmp_path / "cell.json"
    run(capsys, "pack", "--lambda", "1.5", "--out", str(cell))
    data = json.loads(cell.read_text())
    data["lambda"] = 1.0001
    cell.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", "--packing", str(cell), "--min-cell", "0.01")
    assert code == FAILED
    assert json.loads(out)["uncovered_cells"] > 0


def test_missing_file_is_usage_error(tmp_path, capsys):
    code, _, _ = run(capsys, "verify", "--packing", str(tmp_path / "nope.json"))
    assert code == USAGE


def test_render(tmp_path, capsys):
    cell = tmp_path / "cell.json"
    run(capsys, "pack", "--lambda", "1.5", "--out", str(cell))
    code, out, _ = run(capsys, "render", "--packing", str(cell), "--out", str(tmp_path / "r.svg"), "--neighbours")
    assert code == OK
    assert json.loads(out)["elements"] == 9 * json.loads(cell.read_text())["stats"]["tiles_per_triangle"] * 2


def test_trend(tmp_path, capsys):
    code, out, _ = run(capsys, "trend", "--lambdas", "1.5", "1.3", "1.1", "--max-tiles", "200000",
                       "--csv", str(tmp_path / "t.csv"), "--svg", str(tmp_path / "t.svg"))
    assert code == OK
    doc = json.loads(out)
    rows = doc["rows"]
    assert rows[0]["status"] == "built" and rows[-1]["count"] is None
    assert rows[-1]["estimated_count"] > rows[0]["count"]
    assert doc["monotone_over_built"]
    assert len(list(csv.DictReader(open(tmp_path / "t.csv")))) == 3


def test_disc_audit_defaults(tmp_path, capsys):
    code, out, _ = run(capsys, "disc-audit", "--json", str(tmp_path / "audit.json"))
    assert code == OK
    assert "1.0553941" in out and "1.0000213" in out
    assert "audit: PASS" in out
    assert json.loads((tmp_path / "audit.json").read_text())["passed"]


def test_disc_audit_large_alpha_fails(capsys):
    code, out, _ = run(capsys, "disc-audit", "--alpha", "0.7853981633974483")
    assert code == FAILED
    assert "audit: FAIL" in out


def test_disc_calibrate(tmp_path, capsys):
    code, _, _ = run(capsys, "disc-calibrate", "--out", str(tmp_path / "c.json"))
    assert code == OK
    c = json.loads((tmp_path / "c.json").read_text())
    assert c["eps_max"] >= 1e-5


def test_disc_random_then_chase(tmp_path, capsys):
    discs = tmp_path / "discs.json"
    code, out, _ = run(capsys, "disc-random", "--seed", "3", "--out", str(discs))
    assert code == OK and json.loads(out)["discs"] > 0
    code, out, _ = run(capsys, "disc-chase", "--packing", str(discs), "--out", str(tmp_path / "trace.json"),
                       "--svg", str(tmp_path / "chase.svg"))
    assert code == OK
    doc = json.loads(out)
    assert doc["nested_and_shrinking"]
    assert json.loads((tmp_path / "trace.json").read_text())["trace"]["result"] == doc["point"]


def test_bad_subcommand(capsys):
    code, _, _ = run(capsys, "frobnicate")
    assert code == USAGE


@pytest.mark.parametrize("argv", [["--help"], ["pack", "--help"]])
def test_help_exits_zero(argv, capsys):
    assert main(argv) == OK


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "ringcover.cli", "disc-audit"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "audit: PASS" in proc.stdout
