import csv
import io
import json
import subprocess
import sys

import pytest

from polytc.cli import CSV_COLUMNS, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_report_json(capsys):
    code, out, _ = run(capsys, "report", "--n", "6", "--k", "2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert (doc["tc_lower"], doc["tc_upper"], doc["evaluation"]) == (6, 7, 1)
    assert doc["graded_dims"] == [1, 6, 6, 1]
    assert doc["case"] == "B_ODD"
    assert doc["certificate"]["factors"] == [["V", 1, 3], ["R", 0, 2]]


def test_report_table_and_csv(capsys):
    code, out, _ = run(capsys, "report", "--n", "32", "--k", "14")
    assert code == 0
    assert "B_EVEN_LARGE_C" in out and "TC in          [58, 59]" in out
    assert "graded dims" not in out
    code, out, _ = run(capsys, "report", "--n", "9", "--k", "3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == CSV_COLUMNS
    assert rows[0]["case"] == "B_EVEN_SMALL_C" and rows[0]["zdcl"] == "11"


def test_report_from_length(capsys):
    code, out, _ = run(capsys, "report", "--n", "9", "--r", "2.5", "--format", "json")
    assert code == 0 and json.loads(out)["k"] == 3


@pytest.mark.parametrize(
    "argv,code_name",
    [
        (["report", "--n", "6", "--r", "1.0"], "NON_GENERIC"),
        (["report", "--n", "6", "--r", "3.5"], "K_ONE_UNSUPPORTED"),
        (["report", "--n", "6", "--r", "7"], "OUT_OF_RANGE"),
        (["report", "--n", "6", "--k", "3"], "OUT_OF_RANGE"),
    ],
)
def test_report_domain_errors_exit_2(capsys, argv, code_name):
    code, _, err = run(capsys, *argv)
    assert code == 2 and code_name in err


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["report", "--n", "6"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2


def test_experimental_flag(capsys):
    code, out, _ = run(capsys, "report", "--n", "7", "--k", "2", "--format", "json", "--experimental-phi2")
    assert code == 0 and json.loads(out)["experimental_phi1_phi2"] in (0, 1)
    code, out, _ = run(capsys, "report", "--n", "6", "--k", "2", "--format", "json", "--experimental-phi2")
    assert json.loads(out)["experimental_phi1_phi2"] is None


def test_sweep_agrees_with_report(capsys):
    code, out, _ = run(capsys, "sweep", "--n-max", "12", "--format", "json", "--samples", "20")
    assert code == 0
    rows = json.loads(out)
    assert [(r["n"], r["k"]) for r in rows] == sorted((r["n"], r["k"]) for r in rows)
    for row in rows:
        _, rep, _ = run(capsys, "report", "--n", str(row["n"]), "--k", str(row["k"]), "--format", "json")
        rep = json.loads(rep)
        assert row["case"] == rep["case"]
        assert (row["tc_lower"], row["tc_upper"], row["evaluation"]) == (
            rep["tc_lower"], rep["tc_upper"], rep["evaluation"]
        )
        assert row["zdcl"] == 2 * row["n"] - 7


def test_sweep_parallel_matches_serial(capsys):
    _, serial, _ = run(capsys, "sweep", "--n-max", "16", "--format", "csv", "--samples", "5")
    _, parallel, _ = run(capsys, "sweep", "--n-max", "16", "--format", "csv", "--samples", "5", "--jobs", "2")
    assert serial == parallel
    assert serial.splitlines()[0] == ",".join(CSV_COLUMNS)


def test_sweep_table(capsys):
    code, out, _ = run(capsys, "sweep", "--n-max", "16", "--samples", "5")
    assert code == 0
    assert "not checked" in out and "EXHAUSTIVE_MONOMIAL" in out


def test_verify_lemmas(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "lemmas", "--n-max", "32")
    assert code == 0 and "3/3 checks passed" in out


def test_verify_functionals_json(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "functionals", "--n-max", "10", "--format", "json")
    assert code == 0
    results = json.loads(out)
    assert results and all(r["passed"] for r in results)


def test_verify_oracle_and_budget(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "oracle", "--n-max", "7", "--seed", "7")
    assert code == 0 and "FAIL" not in out
    code, _, err = run(capsys, "verify", "--suite", "oracle", "--n-max", "10")
    assert code == 2 and "--force" in err


def test_verify_vanishing_and_certificates(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "vanishing", "--n-max", "8", "--samples", "10")
    assert code == 0 and "exhaustive n=6 k=2 (462 products)" in out
    code, out, _ = run(capsys, "verify", "--suite", "certificates", "--n-max", "14")
    assert code == 0


def test_verify_failure_exits_1(capsys, monkeypatch):
    from polytc import cli

    monkeypatch.setitem(cli.SUITES, "lemmas", lambda **_: [{"check": "planted", "passed": False, "detail": "x"}])
    code, out, _ = run(capsys, "verify", "--suite", "lemmas")
    assert code == 1 and "FAIL  [lemmas] planted" in out


def test_zdcl_writes_files(capsys, tmp_path):
    code, out, _ = run(capsys, "zdcl", "--n", "8", "--k", "3", "--out-dir", str(tmp_path))
    assert code == 0
    assert out.splitlines()[0] == "9"
    cert = json.loads((tmp_path / "certificate_n8_k3.json").read_text())
    van = json.loads((tmp_path / "vanishing_n8_k3.json").read_text())
    assert cert["evaluation"] == 1
    assert van["strategy"] == "EXHAUSTIVE_MONOMIAL" and van["all_vanished"]


def test_certificate_emit_verify_and_tamper(capsys, tmp_path):
    path = tmp_path / "c.json"
    assert run(capsys, "certificate", "emit", "--n", "12", "--k", "5", "-o", str(path))[0] == 0
    code, out, _ = run(capsys, "certificate", "verify", str(path))
    assert code == 0 and out.startswith("OK")
    obj = json.loads(path.read_text())
    obj["factors"][-1][2] += 1
    path.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "certificate", "verify", str(path))
    assert code == 1 and "MISMATCH" in out
    code, _, err = run(capsys, "certificate", "verify", str(tmp_path / "missing.json"))
    assert code == 2 and "cannot read" in err


def test_certificate_emit_stdout_matches_zdcl_file(capsys, tmp_path):
    _, emitted, _ = run(capsys, "certificate", "emit", "--n", "8", "--k", "3")
    run(capsys, "zdcl", "--n", "8", "--k", "3", "--out-dir", str(tmp_path))
    assert emitted == (tmp_path / "certificate_n8_k3.json").read_text()


def test_console_entry_point_and_byte_stability():
    cmd = [sys.executable, "-m", "polytc", "report", "--n", "10", "--k", "4", "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, text=True)
    b = subprocess.run(cmd, capture_output=True, text=True)
    assert a.returncode == 0 and a.stdout == b.stdout
    bad = subprocess.run([sys.executable, "-m", "polytc", "report", "--n", "6", "--r", "1.0"],
                         capture_output=True, text=True)
    assert bad.returncode == 2 and "NON_GENERIC" in bad.stderr
