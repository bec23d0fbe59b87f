import json

import pytest

from disclab import cli
from disclab.errors import ParameterError


def test_gen_and_check(tmp_path, capsys):
    out = tmp_path / "inst.json"
    assert cli.main(["gen", "--n", "8", "--m", "6", "--b", "3", "--seed", "1", "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert set(data) == {"n", "b", "sets"} and len(data["sets"]) == 6
    assert cli.main(["check", str(out)]) == 0
    assert "min_unsplit_fraction" in capsys.readouterr().out


def test_gen_satisfiable(tmp_path, capsys):
    out = tmp_path / "sat.json"
    assert cli.main(["gen", "--satisfiable", "--n", "12", "--m", "9", "--seed", "2", "-o", str(out)]) == 0
    assert "witness" in json.loads(out.read_text())
    assert cli.main(["check", str(out), "--assignment", str(out)]) == 0
    assert json.loads(capsys.readouterr().out.splitlines()[-1])["unsplit"] == 0


def test_gen_bound_violation(capsys):
    assert cli.main(["gen", "--n", "4", "--m", "4", "--b", "3"]) == 2
    assert "4m > bn" in capsys.readouterr().err


def test_bad_flag():
    assert cli.main(["gen", "--n", "x"]) == 2
    assert cli.main(["nosuch"]) == 2


@pytest.fixture
def one_set(tmp_path):
    path = tmp_path / "one.json"
    path.write_text(json.dumps({"n": 4, "b": 3, "sets": [[1, 2, 3, 4]]}))
    return path


def test_reduce(tmp_path, one_set):
    f1, f2 = tmp_path / "f1.json", tmp_path / "f2.json"
    assert cli.main(["reduce", str(one_set), "--theorem", "1", "-o", str(f1)]) == 0
    d1 = json.loads(f1.read_text())
    assert (d1["d"], d1["N"]) == (17, 12)
    assert cli.main(["reduce", str(one_set), "--theorem", "2", "--p", "0", "--q", "1", "-o", str(f2)]) == 0
    d2 = json.loads(f2.read_text())
    assert (d2["d"], d2["N"]) == (3, 6)
    assert cli.main(["reduce", str(one_set), "--theorem", "2"]) == 2
    assert cli.main(["reduce", str(one_set), "--theorem", "2", "--p", "2", "--q", "0"]) == 2


def test_reduce_unused_element(tmp_path):
    path = tmp_path / "i.json"
    path.write_text(json.dumps({"n": 5, "b": 3, "sets": [[1, 2, 3, 4]]}))
    assert cli.main(["reduce", str(path), "--theorem", "1"]) == 2


def test_oracle_verify_cov(tmp_path, one_set, capsys):
    fam, res = tmp_path / "f.json", tmp_path / "o.json"
    cli.main(["reduce", str(one_set), "--theorem", "2", "--p", "0", "--q", "1", "-o", str(fam)])
    assert cli.main(["oracle", str(fam), "-o", str(res)]) == 0
    assert json.loads(res.read_text())["status"] == "exact_zero"
    assert cli.main(["verify", str(fam), str(res), "-o", str(tmp_path / "v.json")]) == 0
    report = json.loads((tmp_path / "v.json").read_text())
    assert report["pass"] and all({"claim", "lhs", "rhs", "pass"} <= set(c) for c in report["checks"])
    assert cli.main(["cov", str(fam), str(res)]) == 0
    assert cli.main(["cov", str(fam), "--baseline"]) == 0
    assert json.loads(capsys.readouterr().out.splitlines()[-1])["op_norm"] == pytest.approx(1.0)


def test_verify_detects_bad_result(tmp_path, one_set):
    fam, res = tmp_path / "f.json", tmp_path / "o.json"
    cli.main(["reduce", str(one_set), "--theorem", "2", "--p", "0", "--q", "1", "-o", str(fam)])
    cli.main(["oracle", str(fam), "-o", str(res)])
    data = json.loads(res.read_text())
    data["upper_bound"] = 0.5  # claims a value the witness does not attain
    res.write_text(json.dumps(data))
    assert cli.main(["verify", str(fam), str(res)]) == 1


def test_capacity_exit(tmp_path):
    inst = tmp_path / "big.json"
    cli.main(["gen", "--n", "16", "--m", "12", "--seed", "0", "--cover", "-o", str(inst)])
    fam = tmp_path / "f.json"
    assert cli.main(["reduce", str(inst), "--theorem", "2", "--p", "0", "--q", "1", "-o", str(fam)]) == 0
    assert cli.main(["oracle", str(fam)]) == 3


def test_report_satisfiable(tmp_path):
    out = tmp_path / "r.csv"
    assert cli.main(["report", "--satisfiable", "--n", "8", "--m", "6", "--count", "2", "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].split(",") == cli.CSV_COLUMNS
    for line in lines[1:]:
        row = dict(zip(cli.CSV_COLUMNS, line.split(",")))
        assert row["C_upper"] == "0" and row["claims_pass"] == "1"


def test_report_unsat_and_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["report", "--n", "8", "--m", "6", "--seed", "8", "--count", "1"]
    assert cli.main([*args, "-o", str(a)]) == 0
    assert cli.main([*args, "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    row = dict(zip(cli.CSV_COLUMNS, a.read_text().splitlines()[1].split(",")))
    assert float(row["gamma0"]) > 0 and float(row["C_lower"]) > 0


def test_run_config_validation():
    with pytest.raises(ParameterError):
        cli.RunConfig(enum_cap=0)
    with pytest.raises(ParameterError):
        cli.RunConfig(oracle_tol=0)


def test_float_format():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert float(cli.fmt(1 / 3)) == 1 / 3
