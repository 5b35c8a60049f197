import subprocess
import sys

import pytest

from pinterp.cli import UsageError, main, read_config
from pinterp.harness import read_csv


def test_check_diagram_passes(capsys):
    assert main(["check", "diagram", "--p", "2", "--seed", "1", "--probes", "2"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 4 and "FAIL" not in out


def test_check_preserve_square(capsys):
    assert main(["check", "preserve", "--p", "2", "--element", "square"]) == 0


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["check", "diagram"]) == 2
    assert main(["check", "nothing"]) == 2
    assert main(["converge", "--op", "pi1"]) == 2
    assert main(["converge", "--op", "picurl", "--field", "rho", "--pmax", "3",
                 "--out", "x.csv"]) == 2
    assert main(["converge", "--op", "pi1", "--field", "nope", "--pmax", "3",
                 "--out", "x.csv"]) == 2
    assert main(["--help"]) == 0


def test_converge_writes_csv(tmp_path, capsys):
    out = tmp_path / "rho.csv"
    code = main(["converge", "--op", "pi1", "--field", "rho", "--alpha", "1.5", "--pmin", "1",
                 "--pmax", "6", "--out", str(out), "--expect-slope", "-1.0"])
    assert code == 0
    recs = read_csv(out)
    assert [r.p for r in recs] == list(range(1, 7))
    assert "PASS slope" in capsys.readouterr().out


def test_failed_expectation_exits_one(tmp_path):
    out = tmp_path / "rho.csv"
    code = main(["converge", "--op", "pi1", "--field", "rho", "--alpha", "1.5", "--pmin", "3",
                 "--pmax", "6", "--out", str(out), "--expect-slope", "-20"])
    assert code == 1


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    out = tmp_path / "a.csv"
    cfg.write_text(f"# study\noperator = pidiv\nfield = edge_power\nalpha = 1.5\n"
                   f"p_min = 1\np_max = 3\nout = {out}\n")
    assert main(["converge", "--config", str(cfg)]) == 0
    recs = read_csv(out)
    assert recs[0].operator == "pidiv" and recs[0].field == "rot(edge_power^1.5)"
    assert main(["converge", "--config", str(cfg), "--pmax", "2"]) == 0
    assert len(read_csv(out)) == 2


def test_read_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    with pytest.raises(UsageError):
        read_config(bad)
    bad.write_text("p_max = many\n")
    with pytest.raises(UsageError):
        read_config(bad)
    bad.write_text("p_max\n")
    with pytest.raises(UsageError):
        read_config(bad)
    with pytest.raises(UsageError):
        read_config(tmp_path / "absent.cfg")
    assert main(["check", "poincare", "--config", str(tmp_path / "absent.cfg")]) == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "pinterp.cli", "check", "diagram", "--p", "1",
                          "--probes", "1"], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
