import json
import re

import pytest

from harmsum.cli import main

BFILE_LINE = re.compile(r"^\d+ -?\d+$")


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_table1_bfile(capsys):
    code, out, err = run(capsys, ["table1", "--upto", "10", "--emit", "bfile"])
    assert code == 0
    assert out.endswith("\n")
    lines = out.splitlines()
    assert all(BFILE_LINE.match(line) for line in lines)
    values = [int(line.split()[1]) for line in lines]
    assert values == [1, 1, 1, 23, 43, 251, 263, 21013, 1407079, 4919311]


def test_table3_rows(capsys):
    code, out, _ = run(capsys, ["table3", "--upto", "5", "--emit", "bfile"])
    assert code == 0
    assert [int(l.split()[1]) for l in out.splitlines()] == [1, 1, 1, 2, 22]


def test_minsum_json_round_trip(capsys):
    code, out, _ = run(capsys, ["minsum", "--n", "4", "--emit", "json"])
    assert code == 0
    line = out.strip()
    obj = json.loads(line)
    assert list(obj) == ["n", "scaled_num", "den", "witness", "tau"]
    assert obj == {"n": 4, "scaled_num": "23", "den": "210", "witness": "-++-", "tau": "0"}
    assert json.dumps(obj) == line


def test_minsum_tsv_default(capsys):
    code, out, _ = run(capsys, ["minsum", "--n", "4"])
    assert code == 0
    rows = dict(line.split("\t") for line in out.splitlines())
    assert rows["scaled_num"] == "23"
    assert rows["den"] == "210"


def test_gap_json(capsys):
    code, out, _ = run(capsys, ["gap", "--n", "5", "--emit", "json"])
    assert code == 0
    obj = json.loads(out)
    assert obj == {"n": 5, "scaled_num": "22", "den": "2310", "witness": "0-++0"}


def test_seq_bfile(capsys):
    code, out, _ = run(capsys, ["seq", "--kind", "pk", "--k", "2", "--n", "6", "--emit", "bfile"])
    assert code == 0
    assert [int(l.split()[1]) for l in out.splitlines()] == [6, 10, 14, 15, 21, 22]


def test_two_stage_json(capsys):
    code, out, _ = run(capsys, ["two-stage", "--n", "10", "--tau", "1/3", "--emit", "json"])
    assert code == 0
    obj = json.loads(out)
    assert list(obj) == ["tau", "refined_target", "residual", "first", "second"]
    assert obj["tau"] == "1/3"
    assert json.dumps(obj) == out.strip()


def test_rho_finite_and_limit(capsys):
    code, out, _ = run(capsys, ["rho", "--n", "3", "--x", "1.0", "--emit", "json"])
    assert code == 0
    assert abs(json.loads(out)["value"]) <= 1e-15
    code, out, _ = run(capsys, ["rho", "--x", "0.5", "--eps", "1e-6", "--emit", "json"])
    assert code == 0
    obj = json.loads(out)
    assert obj["tail_bound"] <= 1e-6
    assert abs(obj["value"] - 0.5466403) <= 1e-6


def test_density_grid_tsv(capsys):
    code, out, _ = run(capsys, ["density", "--grid", "0:1:3", "--eps", "1e-6"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# x\t")
    assert len(lines) == 4


def test_check_json(capsys):
    code, out, _ = run(capsys, ["check", "--bound", "exp", "--n", "10", "--pairs", "50"])
    assert code == 0
    obj = json.loads(out)
    assert obj["passed"] is True
    assert obj["samples"] == 50
    code, out, _ = run(capsys, ["check", "--bound", "decay", "--n", "50", "--alpha", "1.0"])
    assert code == 0
    obj = json.loads(out)
    assert obj["c_prime_defaulted"] is True
    assert obj["samples"] == 0


def test_mc_deterministic(capsys):
    argv = ["mc", "--n", "6", "--samples", "2000", "--seed", "5", "--lo", "-0.1",
            "--hi", "0.1", "--eps", "1e-6", "--emit", "json"]
    code, out1, _ = run(capsys, argv)
    assert code == 0
    code, out2, _ = run(capsys, argv)
    assert out1 == out2
    obj = json.loads(out1)
    assert 0.0 <= obj["empirical_prob"] <= 1.0


def test_usage_errors(capsys):
    code, _, err = run(capsys, ["minsum", "--n", "0"])
    assert code == 2
    assert "usage" in err
    code, _, _ = run(capsys, ["minsum", "--n", "3", "--bogus"])
    assert code == 2
    code, _, err = run(capsys, ["minsum", "--n", "3", "--tau", "abc"])
    assert code == 2
    code, _, err = run(capsys, ["two-stage", "--n", "6", "--tau", "99"])
    assert code == 2
    code, _, err = run(capsys, ["rho", "--x", "0.5"])
    assert code == 2
    code, _, err = run(capsys, ["seq", "--kind", "custom", "--n", "2"])
    assert code == 2


def test_cap_and_truncation_exit_codes(capsys):
    code, _, err = run(capsys, ["minsum", "--n", "49"])
    assert code == 3
    assert "cap" in err
    code, _, err = run(
        capsys,
        ["density", "--kind", "custom", "--values", "2,4,8", "--x", "0", "--eps", "1e-6"],
    )
    assert code == 4


def test_bfile_unavailable(capsys):
    code, _, err = run(capsys, ["density", "--x", "0", "--eps", "1e-6", "--emit", "bfile"])
    assert code == 2
    assert "bfile" in err


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("HARMONIC_THREADS", "4")
    code, out, _ = run(capsys, ["seq", "--n", "3", "--emit", "bfile"])
    assert code == 0
    monkeypatch.setenv("HARMONIC_THREADS", "zero")
    code, _, err = run(capsys, ["seq", "--n", "3"])
    assert code == 2
    assert "HARMONIC_THREADS" in err


def test_help_exits_zero(capsys):
    code, out, _ = run(capsys, ["--help"])
    assert code == 0
    assert "subcommand" in out or "usage" in out
