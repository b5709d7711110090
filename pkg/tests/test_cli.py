import json

import pytest

from ncsym.cli import main
from ncsym.suites import SUITES


def test_verify_exits_zero(capsys):
    assert main(["verify", "--seed", "0", "--samples", "30"]) == 0
    out = capsys.readouterr().out
    assert "PASS suite=verify" in out
    assert "ok  " in out


def test_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-suite"])
    assert exc.value.code == 2


def test_missing_suite_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_flag_rejected_when_suite_lacks_it(capsys):
    assert main(["stern-gerlach", "--samples", "5"]) == 2
    assert "--samples" in capsys.readouterr().err


def test_json_report_round_trip(tmp_path, capsys):
    out = tmp_path / "gns.json"
    assert main(["gns", "--seed", "3", "--out", str(out)]) == 0
    capsys.readouterr()
    data = json.loads(out.read_text())
    assert data["suite"] == "gns"
    assert data["seed"] == 3
    assert data["passed"] is True
    assert all(c["passed"] for c in data["checks"])


def test_reports_are_byte_identical(tmp_path, capsys):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    for path in (first, second):
        assert main(["coupling", "--seed", "11", "--out", str(path)]) == 0
    capsys.readouterr()
    assert first.read_bytes() == second.read_bytes()


def test_csv_output(tmp_path, capsys):
    out = tmp_path / "m.csv"
    assert main(["moyal-limit", "--seed", "0", "--out", str(out), "--format", "csv"]) == 0
    capsys.readouterr()
    lines = out.read_text().splitlines()
    assert lines[0] == "suite,name,passed,value,tolerance"
    assert len(lines) > 1
    assert all(row.split(",")[2] == "true" for row in lines[1:])


def test_verify_algebra_restriction(capsys):
    assert main(["verify", "--algebra", "m2", "--samples", "20"]) == 0
    out = capsys.readouterr().out
    assert "identity.matrix2" in out
    assert "matrix3" not in out
    assert "graded11" not in out


def test_coupling_pair_query(capsys):
    assert main(["coupling", "--left", "quantum:1.0", "--right", "commutative"]) == 0
    out = capsys.readouterr().out
    assert "NoneExistsMixed" in out


def test_coupling_pair_query_needs_both_tokens(capsys):
    assert main(["coupling", "--left", "quantum:1.0"]) == 2
    assert "both factor tokens" in capsys.readouterr().err


def test_unknown_preset_is_usage_error(capsys):
    assert main(["stern-gerlach", "--preset", "upside-down"]) == 2
    assert "preset" in capsys.readouterr().err


def test_every_suite_passes_quickly(capsys):
    # the smoke pass used by the batch runner: all suites, default seed
    for name in SUITES:
        argv = [name, "--seed", "0"]
        if name == "verify":
            argv += ["--samples", "25"]
        assert main(argv) == 0, name
    capsys.readouterr()
