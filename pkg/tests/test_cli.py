import json

from hallpath.cli import main
from hallpath.eha import psi_coeffs


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_act_json(capsys):
    code, out, _ = run(capsys, "act", "1_0 d- d+ 1_0", "--lambda", "1")
    doc = json.loads(out)
    assert code == 0 and doc["state"]["lambda"] == [1]
    assert [s["lambda"] for s, _ in doc["result"]] == [[1, 1], [2]]


def test_act_level_mismatch_exits_2(capsys):
    code, _, err = run(capsys, "act", "1_0 d+ 1_-1")
    assert code == 2 and "level" in err


def test_act_text_and_state_file(capsys, tmp_path):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"side": "+", "lambda": [], "w": [[1, 1]]}))
    code, out, _ = run(capsys, "act", "1_1 z1 1_1", "--state", f"@{f}", "--format", "text")
    assert code == 0 and out.strip()


def test_rewrite_and_scope_error(capsys):
    code, out, _ = run(capsys, "rewrite", "1_0 d- phi d+ 1_0", "-N", "4")
    doc = json.loads(out)
    assert code == 0 and doc["oracle_equal"] and doc["terms"][0]["kind"] == "Y"
    code, _, err = run(capsys, "rewrite", "1_0 d+ 1_-1")
    assert code == 2 and "error" in err


def test_verify_writes_report(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, err = run(capsys, "verify", "--relations", "cubic_e", "-N", "4", "-K", "2",
                       "--workers", "1", "--out", str(out))
    doc = json.loads(out.read_text())
    assert code == 0 and doc["summary"]["fail"] == 0 and "s=1" in err


def test_verify_unknown_relation(capsys):
    code, _, _ = run(capsys, "verify", "--relations", "no_such_thing", "--workers", "1")
    assert code == 2


def test_matrix_psi_is_diagonal(capsys):
    code, out, _ = run(capsys, "matrix", "psi+[1]", "-N", "3")
    doc = json.loads(out)
    assert code == 0
    for r, c, val in doc["entries"]:
        assert doc["rows"][r] == doc["cols"][c]
        lam = tuple(doc["cols"][c]["lambda"])
        assert val == str(psi_coeffs("+", lam, 1)[1])


def test_matrix_e0_raises_size_by_one(capsys):
    code, out, _ = run(capsys, "matrix", "e[0]", "-N", "3")
    doc = json.loads(out)
    assert code == 0 and doc["entries"]
    for r, c, _ in doc["entries"]:
        assert sum(doc["rows"][r]["lambda"]) == sum(doc["cols"][c]["lambda"]) + 1


def test_psi_and_coeffs(capsys):
    code, out, _ = run(capsys, "psi", "--lambda", "2,1", "--order", "3", "--method", "rational")
    assert code == 0 and len(json.loads(out)["psi+"]) == 4
    code, out, _ = run(capsys, "coeffs", "--lambda", "2,1")
    doc = json.loads(out)
    assert code == 0 and len(doc["c"]) == 3 and len(doc["c_star"]) == 2
