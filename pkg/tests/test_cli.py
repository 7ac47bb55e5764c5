import json

import pytest

from semiinv.catalog import parse_descriptor
from semiinv.cli import RunConfig, UsageError, main
from semiinv.poly import parse


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_counts(capsys):
    code, out, _ = run(capsys, "gen", "--m", "4", "--char", "2")
    assert code == 0
    assert json.loads(out)["count"] == 11
    code, out, _ = run(capsys, "gen", "--m", "2", "--char", "0")
    data = json.loads(out)
    assert [g["descriptor"] for g in data["generators"]] == ["det(1)", "det(2)", "br(1,2)"]


def test_gen_manifest_round_trips(capsys, tmp_path):
    path = tmp_path / "man.json"
    assert main(["gen", "--m", "4", "--out", str(path)]) == 0
    for g in json.loads(path.read_text())["generators"]:
        assert parse(g["polynomial"]) == parse_descriptor(g["descriptor"], 4).polynomial()


def test_verify_suites(capsys):
    assert run(capsys, "verify", "identities")[0] == 0
    code, out, _ = run(capsys, "verify", "nakayama", "--m", "6", "--char", "2")
    assert code == 0
    assert all(not r["decomposable"] for r in json.loads(out)["results"])
    code, out, _ = run(capsys, "verify", "nakayama", "--m", "6", "--char", "0")
    rep = json.loads(out)
    assert code == 0
    xi3 = [r for r in rep["results"] if r["generator"] == "xi(1,2,3,4,5,6)"][0]
    assert xi3["decomposable"] and xi3["certificate"]["combination"]
    assert run(capsys, "verify", "spanning", "--m", "3", "--degree", "4")[0] == 0
    assert run(capsys, "verify", "invariance", "--m", "2", "--trials", "20")[0] == 0


def test_fuzz(capsys):
    code, out, _ = run(capsys, "fuzz", "invariance", "--m", "4", "--p", "65521", "--trials", "50")
    assert code == 0 and json.loads(out)["failures"] == 0
    code, out, _ = run(capsys, "fuzz", "separating", "--m", "4", "--p", "101", "--trials", "70")
    assert code == 0 and json.loads(out)["counterexample_count"] == 0
    code, out, _ = run(capsys, "fuzz", "irredundancy", "--m", "2", "--removed", "br(1,2)")
    assert code == 0 and json.loads(out)["witnesses"]


@pytest.mark.parametrize(
    "argv",
    [
        ["fuzz", "invariance", "--p", "91"],
        ["gen", "--degree", "7"],
        ["gen", "--degree", "14"],
        ["gen", "--char", "3"],
        ["verify", "bogus"],
        ["fuzz", "irredundancy", "--m", "2"],
        ["fuzz", "irredundancy", "--m", "3", "--removed", "xi(1,2,3,4)"],
        ["fuzz", "separating", "--degree", "8"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig(p=91)
    assert RunConfig(p=101, degree=12).degree == 12


def test_eval(capsys, tmp_path):
    man = tmp_path / "man.json"
    main(["gen", "--m", "3", "--out", str(man)])
    capsys.readouterr()
    pts = tmp_path / "pts.json"
    zero = [[[0, 0], [0, 0]]] * 3
    ident = [[[1, 0], [0, 1]]] * 3
    pts.write_text(json.dumps([zero, ident]))
    code, out, _ = run(capsys, "eval", str(man), str(pts), "--p", "7")
    rows = json.loads(out)["values"]
    assert code == 0
    assert set(rows[0]) == {"0"}
    assert rows[1][:3] == ["1", "1", "1"]


def test_eval_descriptor_list(capsys, tmp_path):
    s = tmp_path / "set.json"
    s.write_text('["det(1)", "br(1,2)", "1*x[1,1,1]"]')
    pts = tmp_path / "pts.json"
    pts.write_text('[[[["1/2", 0], [0, 2]], [[1, 0], [0, 1]]]]')
    code, out, _ = run(capsys, "eval", str(s), str(pts))
    assert code == 0
    assert json.loads(out)["values"] == [["1", "5/2", "1/2"]]


def test_eval_errors(capsys, tmp_path):
    s = tmp_path / "set.json"
    s.write_text('["det(1)"]')
    bad = tmp_path / "bad.json"
    bad.write_text('[\n  [1,\n  ]\n')
    code, _, err = run(capsys, "eval", str(s), str(bad))
    assert code == 2 and ":3:" in err
    assert main(["eval", str(s), str(tmp_path / "missing.json")]) == 2
    shape = tmp_path / "shape.json"
    shape.write_text("[[[1, 2]]]")
    assert main(["eval", str(s), str(shape)]) == 2


def test_determinism(capsys, tmp_path):
    outs = []
    for n in range(2):
        path = tmp_path / f"r{n}.json"
        main(["fuzz", "separating", "--m", "4", "--trials", "30", "--seed", "9", "--out", str(path)])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
