"""Tests for the command line interface."""

import pytest

from tetrasieve import cli
from tetrasieve import sieve as SV
from tetrasieve.config import ConfigError, resolve


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sieve_table(capsys):
    code, out, _ = run(capsys, "sieve", "--max", "350", "--fixtures")
    assert code == 0
    assert "Lambda: {163, 277, 349}" in out


def test_sieve_structured_round_trip(capsys):
    code, out, _ = run(capsys, "sieve", "--max", "200", "--emit", "structured")
    assert code == 0
    reps = SV.load_reports(out)
    assert [r.ell for r in reps if r.verdict] == [163]
    assert "# mode: fixture" in out


def test_sieve_missing_fixtures_exit_3(capsys, tmp_path):
    code, out, err = run(capsys, "sieve", "--max", "170", "--fixtures", str(tmp_path))
    assert code == 3
    assert "pending backend" in err


def test_usage_errors_exit_4(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["sieve"])
    assert exc.value.code == 4
    code, _, _ = run(capsys, "sieve", "--max", "5")
    assert code == 4
    code, _, err = run(capsys, "periods", "--prime", "11")
    assert code == 4 and "1 mod 3" in err


def test_verify(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert "FAIL" not in out and out.count("PASS") >= 10


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--trace", "8", "--level", "2", "--prime", "163")
    assert code == 0 and "branch: BanalLift" in out
    code, out, _ = run(capsys, "classify", "--trace", "0", "--level", "1", "--prime", "163")
    assert code == 2 and "branch: rejected" in out


def test_periods(capsys):
    code, out, _ = run(capsys, "periods", "--prime", "7")
    assert code == 0
    assert "poly: 1 1 -2 -1" in out and "disc_field: 49" in out


def test_classgroup(capsys):
    code, out, _ = run(capsys, "classgroup", "--prime", "163")
    assert code == 0
    assert "h: 4" in out and "invariants: 2 2" in out and "condition2: true" in out


def test_rayclass_from_fixture(capsys, tmp_path):
    code, out, _ = run(capsys, "rayclass", "--prime", "163", "--record", str(tmp_path))
    assert code == 0
    assert "# m=1 n=3 ram_ok=true" in out
    assert len(list(tmp_path.glob("rayclass_0163_*.txt"))) == 1


def test_backend_failure_exit_3(capsys):
    code, _, err = run(capsys, "rayclass", "--prime", "163", "--live", "--backend", "/nonexistent/gp")
    assert code == 3 and "not found" in err


def test_config_precedence(tmp_path):
    ini = tmp_path / "ts.ini"
    ini.write_text("[tetrasieve]\njobs = 3\ntimeout = 10\nbackend = gp -q\n")
    env = {"TETRASIEVE_CONFIG": str(ini), "TETRASIEVE_TIMEOUT": "20"}
    s = resolve({"timeout": None, "jobs": None}, env=env)
    assert (s.jobs, s.timeout, s.backend) == (3, 20.0, ["gp", "-q"])
    assert s.sources["jobs"] == "file" and s.sources["timeout"] == "env"
    s = resolve({"jobs": 5}, env=env)
    assert s.jobs == 5 and s.sources["jobs"] == "flag"
    with pytest.raises(ConfigError):
        resolve({"jobs": 0}, env={})
