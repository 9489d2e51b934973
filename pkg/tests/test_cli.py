import subprocess
import sys
from pathlib import Path

import pytest

from qcsync import cli
from qcsync import harness as hs

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

SMALL_TELEPORT = """\
[scenario]
protocol = teleport
omega = 2.0
trials = 300
seed = 5

[oracle]
tau = 0.3
delta = 0.0
"""


@pytest.fixture
def teleport_file(tmp_path):
    path = tmp_path / "t.ini"
    path.write_text(SMALL_TELEPORT)
    return path


def test_teleport_writes_csv(teleport_file, tmp_path):
    out = tmp_path / "o.csv"
    assert cli.main(["teleport", "--scenario", str(teleport_file), "--out", str(out)]) == 0
    _, columns, rows = hs.load_csv(out)
    assert columns == hs.TELEPORT_COLUMNS
    assert len(rows) == 300


def test_seed_override(teleport_file, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["teleport", "--scenario", str(teleport_file), "--out", str(a)])
    cli.main(["teleport", "--scenario", str(teleport_file), "--out", str(b), "--seed", "6"])
    assert a.read_bytes() != b.read_bytes()
    assert "# scenario.seed = 6" in b.read_text()


def test_protocol_mismatch_is_validation_error(teleport_file, tmp_path):
    assert cli.main(["ramsey", "--scenario", str(teleport_file), "--out", str(tmp_path / "o.csv")]) == 3


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("omega = 1\n")
    assert cli.main(["qcs", "--scenario", str(bad), "--out", str(tmp_path / "o.csv")]) == 2


def test_validation_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text(SMALL_TELEPORT.replace("trials = 300", "trials = 0"))
    assert cli.main(["teleport", "--scenario", str(bad), "--out", str(tmp_path / "o.csv")]) == 3
    assert "trials" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path):
    assert cli.main(["teleport", "--scenario", str(tmp_path / "nope.ini"), "--out", str(tmp_path / "o.csv")]) == 5


def test_runtime_error_exit_code(tmp_path):
    bad = tmp_path / "late.ini"
    bad.write_text(SMALL_TELEPORT + "[teleport]\ncorrection_time = -1\n")
    assert cli.main(["teleport", "--scenario", str(bad), "--out", str(tmp_path / "o.csv")]) == 4


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as info:
        cli.main(["teleport"])
    assert info.value.code == 2


def test_estimate_from_records_matches_run_summary(teleport_file, tmp_path):
    records, out = tmp_path / "r.csv", tmp_path / "e.csv"
    cli.main(["teleport", "--scenario", str(teleport_file), "--out", str(records)])
    assert cli.main(["estimate", "--scenario", str(teleport_file), "--out", str(out),
                     "--records", str(records)]) == 0
    _, columns, rows = hs.load_csv(out)
    summary = hs.run(hs.load_scenario(teleport_file)).summary
    assert float(rows[0][columns.index("phi_hat")]) == summary["phi_hat"]


def test_estimate_rejects_wrong_records(teleport_file, tmp_path):
    other = tmp_path / "x.csv"
    other.write_text("a,b\n1,2\n")
    assert cli.main(["estimate", "--scenario", str(teleport_file), "--out", str(tmp_path / "e.csv"),
                     "--records", str(other)]) == 4


def test_audit_gauge_shift(teleport_file, tmp_path, capsys):
    out = tmp_path / "a.csv"
    assert cli.main(["audit-gauge", "--scenario", str(teleport_file), "--out", str(out), "--shift", "0.7"]) == 0
    assert capsys.readouterr().out.strip() == "identical"
    _, columns, rows = hs.load_csv(out)
    assert rows[0][0] == "true"
    assert rows[0][1] == rows[0][2]


def test_audit_gauge_broken_pair(teleport_file, tmp_path, capsys):
    broken = tmp_path / "broken.ini"
    broken.write_text(SMALL_TELEPORT.replace("tau = 0.3", "tau = 0.8"))
    out = tmp_path / "a.csv"
    assert cli.main(["audit-gauge", "--scenario", str(teleport_file), "--out", str(out),
                     "--other", str(broken)]) == 0
    assert capsys.readouterr().out.strip() == "DIFFERENT"


def test_audit_from_two_files(tmp_path, capsys):
    out = tmp_path / "a.csv"
    assert cli.main(["audit-gauge", "--scenario", str(SCENARIOS / "teleport.ini"), "--out", str(out),
                     "--other", str(SCENARIOS / "teleport_shifted.ini"), "--seed", "3"]) == 0
    assert capsys.readouterr().out.strip() == "identical"


@pytest.mark.parametrize("name", sorted(p.name for p in SCENARIOS.glob("*.ini")))
def test_shipped_scenarios_load(name):
    assert hs.load_scenario(SCENARIOS / name).public.trials >= 1


def test_module_entry_point(teleport_file, tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run([sys.executable, "-m", "qcsync", "teleport", "--scenario", str(teleport_file),
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
