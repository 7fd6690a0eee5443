import json

import pytest

from symcodes.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dj_reduced_json(capsys):
    code, out, _ = run(capsys, "dj", "--q", "7", "--m", "2", "--reduced", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["params"] == {"n": 21, "k": 3, "d": 15}
    assert data["matches_closed_form"]
    weights = list(data["weight_distribution"])
    assert weights == sorted(weights, key=int)


def test_json_is_byte_identical(capsys):
    argv = ("scan", "type1", "--q", "7", "--sample", "30", "--seed", "4", "--threads", "2", "--format", "json")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b and json.loads(a)


def test_bounds_and_field(capsys):
    code, out, _ = run(capsys, "bounds", "--kind", "theorem1", "--q", "9", "--format", "json")
    assert code == 0 and json.loads(out)["value"] == 25
    code, out, _ = run(capsys, "field", "--p", "3", "--e", "2", "--format", "json")
    assert code == 0 and json.loads(out)["modulus"] == [1, 0, 1]


def test_cubic_csv_columns(capsys):
    code, out, _ = run(capsys, "scan", "cubic", "--q", "5", "--delta-mode", "lambda", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "k,Nk,d"


def test_code_descriptor(capsys):
    code, out, _ = run(capsys, "code", "--descriptor", "type2:q=7;s=5", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["params"]["d"] == 15
    assert data["bound_checks"][0]["value"] == 12


def test_table3_and_table1(capsys):
    code, out, _ = run(capsys, "table", "3", "--q", "7", "--format", "json")
    data = json.loads(out)
    assert code == 0 and (data["max_d"], data["Nk"]) == (14, 14)
    code, out, _ = run(capsys, "table", "1", "--q", "5", "--format", "json")
    assert code == 0 and "max_external_intersection" in json.loads(out)


def test_out_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "dj", "--q", "5", "--m", "2", "--format", "json", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["params"]["n"] == 20


@pytest.mark.parametrize("argv,flag", [
    (("dj", "--q", "6", "--m", "2"), "--q"),
    (("dj", "--q", "7"), "--m"),
    (("scan", "type1", "--q", "7", "--sample", "5"), "--seed"),
    (("code", "--descriptor", "type2:q=7;s=2"), ""),
    (("dj", "--q", "7", "--m", "2", "--threads", "0"), "--threads"),
])
def test_validation_exit_2(capsys, argv, flag):
    code, _, err = run(capsys, *argv)
    assert code == 2 and flag in err


def test_too_large_exit_3(capsys):
    code, _, err = run(capsys, "census", "--q", "13")
    assert code == 3 and "estimated work" in err
    code, _, _ = run(capsys, "scan", "type1", "--q", "13")
    assert code == 3


def test_empty_scan_message(capsys):
    code, out, _ = run(capsys, "scan", "cubic", "--q", "3")
    assert code == 0 and "no admissible choices" in out
