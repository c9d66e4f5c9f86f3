import json
import subprocess
import sys

import pytest

from haratara.cli import run


@pytest.fixture
def rsk(tmp_path, fixture_source):
    path = tmp_path / "ad_perception.rsk"
    path.write_text(fixture_source, encoding="utf-8")
    return path


def test_asil(capsys):
    assert run(["asil", "--severity", "S3", "--exposure", "E4", "--controllability", "C3"]) == 0
    assert capsys.readouterr().out == "D\n"


def test_risk(capsys):
    assert run(["risk", "--impact", "high", "--feasibility", "medium"]) == 0
    assert capsys.readouterr().out == "High\n"


def test_check_fixture(rsk, capsys):
    assert run(["check", str(rsk)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 1 and out[0].startswith("warning W-OVR ")


def test_check_with_errors_exits_1(rsk, capsys):
    rsk.write_text(rsk.read_text().replace("treatment: reduction", "treatment: acceptance"))
    assert run(["check", str(rsk)]) == 1
    assert "error E-ACCEPT" in capsys.readouterr().out


def test_check_parse_failure_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.rsk"
    bad.write_text('item "x" { function "f" }\nhazard H1 { limitation: q }\n')
    assert run(["check", str(bad)]) == 2
    assert "E-ENUM 2:25" in capsys.readouterr().out


def test_check_many_files(rsk, tmp_path, capsys):
    bad = tmp_path / "bad.rsk"
    bad.write_text("nonsense")
    assert run(["check", str(rsk), str(bad)]) == 2
    out = capsys.readouterr().out
    assert f"{rsk}: warning W-OVR" in out and f"{bad}: error E-SYNTAX" in out


def test_usage_and_io_errors_exit_3(tmp_path, capsys):
    assert run(["frobnicate"]) == 3
    assert run(["asil", "--severity", "S9", "--exposure", "E4", "--controllability", "C3"]) == 3
    assert run(["check", str(tmp_path / "missing.rsk")]) == 3
    assert run(["what-if", str(tmp_path / "x.rsk"), "--set", "nodot"]) == 3
    assert "usage" in capsys.readouterr().err


def test_report_stdout_is_only_the_table(rsk, capsys):
    assert run(["report", str(rsk), "--table", "hara", "--format", "json"]) == 0
    captured = capsys.readouterr()
    assert len(json.loads(captured.out)) == 5
    assert "W-OVR" in captured.err


def test_report_to_file(rsk, tmp_path, capsys):
    out = tmp_path / "tara.csv"
    assert run(["report", str(rsk), "--table", "tara", "--format", "csv", "-o", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 10
    assert capsys.readouterr().out == ""


def test_report_refuses_errors_unless_forced(rsk, capsys):
    rsk.write_text(rsk.read_text().replace('  safety_goal: "Ensure robustness', '  # "'))
    assert run(["report", str(rsk), "--table", "trace", "--format", "md"]) == 1
    assert capsys.readouterr().out == ""
    assert run(["report", str(rsk), "--table", "trace", "--format", "md", "--force"]) == 1
    captured = capsys.readouterr()
    assert "| Robustness |" in captured.out and "E-GOAL" in captured.err


def test_report_assets(rsk, capsys):
    assert run(["report", str(rsk), "--table", "assets", "--format", "md"]) == 0
    lines = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("|")]
    assert len(lines) == 12


def test_custom_matrix(rsk, tmp_path, capsys):
    matrix = tmp_path / "m.cfg"
    matrix.write_text("\n".join(f"{i},{f},high" for i in ("low", "medium", "high")
                                for f in ("low", "medium", "high")))
    assert run(["risk", "--impact", "low", "--feasibility", "low", "--matrix", str(matrix)]) == 0
    assert capsys.readouterr().out == "High\n"
    # everything High now: T-E2 acceptance becomes a high-risk acceptance
    assert run(["check", str(rsk), "--matrix", str(matrix)]) == 1


def test_invalid_matrix(tmp_path, capsys):
    matrix = tmp_path / "m.cfg"
    matrix.write_text("high,high,low\nlow,low,high\nlow,high,medium\n")
    assert run(["risk", "--impact", "low", "--feasibility", "low", "--matrix", str(matrix)]) == 1
    err = capsys.readouterr().err
    assert "E-MISSING" in err and "E-MONOTONE" in err
    matrix.write_text("high,high\n")
    assert run(["risk", "--impact", "low", "--feasibility", "low", "--matrix", str(matrix)]) == 2


def test_what_if(rsk, capsys):
    assert run(["what-if", str(rsk), "--set", "H-G.exposure=E2", "--set", "T-R1.feasibility=low"]) == 0
    assert capsys.readouterr().out.splitlines() == ["H-G: D -> B", "T-R1: High -> Medium"]
    assert run(["what-if", str(rsk), "--set", "H-E.exposure=E3"]) == 0
    assert capsys.readouterr().out == ""
    assert run(["what-if", str(rsk), "--set", "H-Z.exposure=E3"]) == 1
    assert "E-REF" in capsys.readouterr().err


def test_standards(capsys):
    assert run(["standards", "--limitation", "E"]) == 0
    assert capsys.readouterr().out.splitlines() == ["ISO PAS 8800", "ANSI/UL 4600"]
    assert run(["standards", "--id", "ISO/SAE 21434"]) == 0
    assert capsys.readouterr().out == "Robustness\n"
    assert run(["standards", "--id", "ISO 26262"]) == 0
    assert capsys.readouterr().out == ""
    assert run(["standards", "--id", "nope"]) == 1
    assert "E-UNKNOWN-STD" in capsys.readouterr().err


def test_fmt_write_idempotent(rsk, capsys):
    assert run(["fmt", str(rsk), "--write"]) == 0
    first = rsk.read_bytes()
    assert run(["fmt", str(rsk), "--write"]) == 0
    assert rsk.read_bytes() == first
    assert run(["fmt", str(rsk)]) == 0
    assert capsys.readouterr().out.encode() == first


def test_example_prints_fixture(capsys, fixture_source):
    assert run(["example"]) == 0
    assert capsys.readouterr().out == fixture_source


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "haratara", "asil", "--severity", "S2",
                           "--exposure", "E3", "--controllability", "C2"],
                          capture_output=True, text=True, check=False)
    assert (proc.returncode, proc.stdout) == (0, "A\n")
