import csv
import io
import json

import pytest

from qpc_repeater.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bm_prob_preset(capsys):
    code, out, _ = run(capsys, "bm-prob", "--paper-table-1")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) == 7 and len(rows[0]) == 8
    assert rows[1] == ["(1,1)", "50.00", "49.50", "47.50", "45.00", "37.50", "25.00", "15.00"]
    assert "\r" not in out


def test_bm_prob_empty_and_invalid(capsys):
    code, out, _ = run(capsys, "bm-prob", "--eta", "0.5")
    assert code == 0 and out == "code,eta=0.5\n"
    assert run(capsys, "bm-prob", "--eta", "1.5")[0] == 2
    assert run(capsys, "bm-prob", "--code", "2,2")[0] == 2
    assert run(capsys, "bm-prob", "--code", "0,2", "--eta", "0.5")[0] == 2


def test_pmu_table(capsys):
    code, out, _ = run(capsys, "pmu-table", "--code", "1,1", "--code", "3,3")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[1][:2] == ["(1,1)", "50.00"]
    assert rows[2] == ["(3,3)", "87.50", "75.00", "56.25", "32.14", "10.71"]


def test_pmu_preset_caps_columns(capsys):
    code, out, _ = run(capsys, "pmu-table", "--paper-table-s1")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 25 and rows[0][-1] == "mu=18"
    thirty_six = [r for r in rows if r[0] == "(30,6)"][0]
    assert set(thirty_six[1:]) == {"100.00"}


def test_rate_json(capsys):
    code, out, _ = run(
        capsys, "rate", "--code", "37,6", "--spacing-km", "2.09", "--eta-missing", "0.97", "--format", "json"
    )
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1
    assert set(doc) == {"schema_version", "inputs", "results"}
    assert doc["results"][0]["rt0"] == pytest.approx(0.7346, abs=5e-5)


def test_rate_needs_spacing(capsys):
    assert run(capsys, "rate", "--code", "2,2")[0] == 2


def test_rate_unreachable_target(capsys):
    code, _, err = run(capsys, "rate", "--code", "1,1", "--spacing-km", "2", "--target-rate", "0.5")
    assert code == 2 and "unreachable" in err


def test_curve(capsys):
    code, out, _ = run(capsys, "curve", "--code", "23,5", "--spacing-km", "1", "--spacing-km", "2")
    assert code == 0 and out.count("\n") == 3


def test_optimize_small(capsys, tmp_path):
    target = tmp_path / "opt.csv"
    argv = ["optimize", "--distance-km", "200", "--n-range", "1,6", "--m-range", "1,3", "--top", "2"]
    assert run(capsys, *argv, "--out", str(target))[0] == 0
    first = target.read_bytes()
    assert run(capsys, *argv, "--out", str(target), "--workers", "3")[0] == 0
    assert target.read_bytes() == first
    assert first.count(b"\n") == 3


def test_optimize_bad_range(capsys):
    assert run(capsys, "optimize", "--n-range", "5,1")[0] == 2


def test_resources(capsys):
    code, out, _ = run(capsys, "resources", "--code", "23,5")
    assert out.splitlines()[1] == '"(23,5)",229,10,0.9990'


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--trials", "50000")
    assert code == 0
    assert out.count(",yes,") == 4


def test_missing_command(capsys):
    assert run(capsys)[0] == 2
