import csv
import json
import subprocess
import sys

import pytest

from forge.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, main


def rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_unknown_suite_is_usage_error(capsys):
    assert main(["verify", "bogus"]) == EXIT_USAGE


def test_missing_command_is_usage_error():
    assert main([]) == EXIT_USAGE


def test_help_exits_ok(capsys):
    assert main(["--help"]) == EXIT_OK
    assert "verify" in capsys.readouterr().out


def test_verify_budget_exceeded(tmp_path):
    rep = tmp_path / "r.json"
    assert main(["verify", "ks", "--n-max", "9", "--budget-atoms", "1000", "--report", str(rep)]) == EXIT_BUDGET
    data = json.loads(rep.read_text())
    assert data["status"] == "fail" and "budget" in data["error"]
    assert data["claims"]  # the rows finished before the overrun are kept


def test_verify_report_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["verify", "hahn", "--seed", "3"]
    assert main(args + ["--report", str(a)]) == EXIT_OK
    assert main(args + ["--report", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert data["suite"] == "hahn"
    assert data["status"] == "pass" and all(r["status"] == "pass" for r in data["claims"])


def test_export_nu_json_round_trip(tmp_path):
    out = tmp_path / "nu.json"
    assert main(["export", "nu", "--n", "4", "-o", str(out)]) == EXIT_OK
    first = out.read_bytes()
    data = json.loads(first)
    assert len(data["atoms"]) == 256
    assert main(["export", "nu", "--n", "4", "-o", str(out)]) == EXIT_OK
    assert out.read_bytes() == first


def test_export_nu_over_budget(tmp_path):
    assert main(["export", "nu", "--n", "9", "--budget-atoms", "1000", "-o", str(tmp_path / "x.json")]) == EXIT_BUDGET


def test_export_ks_block_csv(tmp_path):
    out = tmp_path / "ks.csv"
    assert main(["export", "ks-block", "--a", "0.25", "--b", "0.5", "--format", "csv", "-o", str(out)]) == EXIT_OK
    r = rows(out)
    assert r[0] == ["x", "re", "im"]
    assert [float(v[1]) for v in r[1:]] == [1.0, 1.0, 1.0, -1.0]


def test_export_bad_block_is_usage_error(tmp_path):
    assert main(["export", "ks-block", "--a", "0.5", "--b", "0.5", "-o", str(tmp_path / "x.json")]) == EXIT_USAGE


def test_export_omega_csv_refused(tmp_path):
    assert main(["export", "omega", "--m", "1", "--format", "csv", "-o", str(tmp_path / "o.csv")]) == EXIT_USAGE


def test_export_g_csv_and_report(tmp_path):
    out, rep = tmp_path / "g.csv", tmp_path / "g.json"
    assert main(["export", "g", "--A", "0.3", "--samples", "257", "-o", str(out), "--report", str(rep)]) == EXIT_OK
    r = rows(out)
    assert r[0] == ["x", "g(x)"] and len(r) == 258
    assert float(r[1][0]) == -2.0 and float(r[-1][0]) == 2.0
    assert "claims" in json.loads(rep.read_text())


def test_sample_ft_rows(tmp_path):
    out = tmp_path / "ft.csv"
    assert main(["sample-ft", "ks-block", "--window", "0,10", "--step", "0.01", "-o", str(out)]) == EXIT_OK
    r = rows(out)
    assert r[0] == ["t", "re", "im", "abs"]
    assert len(r) == 1002
    assert float(r[1][3]) == 2.0


def test_sample_ft_from_exported_file(tmp_path):
    src = tmp_path / "nu.json"
    main(["export", "nu", "--n", "2", "-o", str(src)])
    out = tmp_path / "ft.csv"
    assert main(["sample-ft", str(src), "--window", "0,1", "--step", "0.5", "-o", str(out)]) == EXIT_OK
    r = rows(out)
    assert len(r) == 4 and float(r[1][3]) == 4.0


def test_sample_ft_empty_window(tmp_path):
    out = tmp_path / "e.csv"
    assert main(["sample-ft", "nu", "--window", "1,0", "-o", str(out)]) == EXIT_OK
    assert rows(out) == [["t", "re", "im", "abs"]]


@pytest.mark.parametrize("argv", [
    ["sample-ft", "nope.json", "-o", "x.csv"],
    ["sample-ft", "ks-block", "--step", "0", "-o", "x.csv"],
    ["sample-ft", "ks-block", "--window", "abc", "-o", "x.csv"],
])
def test_sample_ft_usage_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == EXIT_USAGE


def test_module_entry_point(tmp_path):
    out = tmp_path / "ft.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "forge.cli", "sample-ft", "ks-block", "--window", "0,1", "--step", "0.5", "-o", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert len(rows(out)) == 4
