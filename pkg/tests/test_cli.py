import json

import pytest

from twoclass.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_pell(capsys):
    code, out, _ = run(capsys, "--format", "json", "pell", "66")
    assert code == 0
    data = json.loads(out)
    assert (data["x_num"], data["y_num"], data["norm"]) == ("65", "8", "1")


def test_format_after_subcommand(capsys):
    code, out, _ = run(capsys, "classdata", "-66", "--format", "json")
    assert code == 0 and json.loads(out)["h2"] == "8"


def test_table_output(capsys):
    code, out, _ = run(capsys, "jacobi", "3", "11")
    assert code == 0 and "jacobi" in out and "1" in out


def test_decompose(capsys):
    code, out, _ = run(capsys, "--format", "json", "decompose", "--case", "2q1q2", "--q1", "3", "--q2", "11")
    assert code == 0
    assert json.loads(out)["verified"] is True


def test_qindex_and_kuroda(capsys):
    code, out, _ = run(capsys, "--format", "json", "qindex", "--gens", "3,11")
    assert code == 0 and json.loads(out)["q_index"] == "4"
    code, out, _ = run(capsys, "--format", "json", "kuroda", "--gens=-3,11,2", "--q", "4")
    assert code == 0 and json.loads(out)["h2"] == "8"
    code, out, _ = run(capsys, "--format", "json", "kuroda", "--gens", "2,3,11", "--q", "64")
    assert code == 1 and json.loads(out)["h2"] is None


def test_hasse(capsys):
    code, out, _ = run(capsys, "--format", "json", "hasse", "--gens=-1,2,3,11", "--n0", "3")
    assert code == 0 and json.loads(out)["Q"] == "2"


def test_iwasawa_commands(capsys):
    code, out, _ = run(capsys, "--format", "json", "splitting", "3", "2")
    assert json.loads(out)["count_real"] == "1"
    code, out, _ = run(capsys, "--format", "json", "kida", "--pair", "11,3")
    assert json.loads(out)["lambda_minus"] == "1"


def test_predict_and_pi(capsys):
    code, out, _ = run(capsys, "--format", "json", "predict", "--d", "33", "--n", "2")
    assert code == 0 and json.loads(out)["cl2_type"] == ["2", "8"]
    code, out, _ = run(capsys, "--format", "json", "pi", "73")
    assert code == 0 and json.loads(out)["gaussian"] == ["3 + 8i", "3 - 8i"]


def test_usage_errors(capsys):
    assert run(capsys, "predict", "--d", "41", "--n", "1")[0] == 2
    assert run(capsys, "jacobi", "3", "4")[0] == 2
    assert run(capsys, "decompose", "--case", "q", "--q1", "7")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["scan", "--lemma", "nope", "--bound", "10"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_scan(capsys, tmp_path):
    cache = str(tmp_path / "c.jsonl")
    code, out, _ = run(capsys, "scan", "--lemma", "kida", "--bound", "60", "--cache", cache)
    assert code == 0 and "lambda-(F)=1" in out
    code, out, _ = run(capsys, "--format", "json", "scan", "--lemma", "splitting", "--bound", "40", "--jobs", "2")
    assert code == 0 and json.loads(out)["failures"] == []
