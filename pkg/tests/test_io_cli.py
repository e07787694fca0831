import json
import subprocess
import sys

import pytest

from cayleyposets.cli import main
from cayleyposets.errors import CycleError, SchemaError
from cayleyposets.families import n_poset
from cayleyposets.io import parse_poset_file, poset_from_json, poset_to_json, to_dot, write_poset_file
from cayleyposets.poset import weak_order
from cayleyposets.recognizer import recognize


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture
def n_file(tmp_path):
    path = tmp_path / "n.json"
    write_poset_file(n_poset(), path)
    return path


def test_json_roundtrip(tmp_path):
    P = weak_order([2, 1, 2])
    assert poset_from_json(poset_to_json(P)) == P
    assert poset_from_json({"poset": poset_to_json(P)}) == P


def test_bad_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2,\n "covers": [[0, 1],]}')
    with pytest.raises(SchemaError, match="line 2"):
        parse_poset_file(path)
    with pytest.raises(SchemaError):
        poset_from_json({"n": 2, "covers": [[0, 7]]})
    with pytest.raises(CycleError):
        poset_from_json({"n": 2, "covers": [[0, 1], [1, 0]]})


def test_dot_output():
    P = n_poset()
    cert = recognize(P, "monoid").certificate
    dot = to_dot(P, cert)
    assert dot.startswith('digraph "poset"') and "rankdir=BT" in dot
    assert dot.count("->") == 3
    assert "doublecircle" in dot and "style=bold" in dot
    assert to_dot(P, cert) == dot


def test_cli_recognize(capsys, n_file):
    code, rec = run(capsys, "recognize", "--in", str(n_file), "--class", "monoid")
    assert code == 0 and rec["verdicts"]["monoid"] == "yes"
    assert rec["exit_code"] == 0 and str(n_file) in rec["inputs"]


def test_cli_classify(capsys, n_file):
    code, rec = run(capsys, "classify", "--in", str(n_file))
    assert code == 0
    assert rec["verdicts"] == {"semigroup": "yes", "monoid": "yes", "full": "yes",
                               "full_monoid": "no", "act": "yes"}


def test_cli_unknown_and_input_errors(capsys, n_file, tmp_path):
    path = tmp_path / "w.json"
    write_poset_file(weak_order([2, 2, 2]), path)
    code, rec = run(capsys, "recognize", "--in", str(path), "--class", "full", "--budget", "1")
    assert code == 2 and rec["verdicts"]["full"] == "unknown"
    code, rec = run(capsys, "recognize", "--in", str(tmp_path / "missing.json"), "--class", "full")
    assert code == 1 and "error" in rec
    assert main(["recognize", "--bogus"]) == 1


def test_cli_census(capsys, tmp_path):
    out = tmp_path / "census.json"
    code, rec = run(capsys, "census", "--n", "4", "--out", str(out))
    assert code == 0 and out.exists()


def test_cli_construct(capsys, tmp_path):
    pipeline = [
        {"name": "a", "op": "antichain", "k": 2},
        {"name": "b", "op": "adjoin", "of": "a", "which": "min"},
        {"name": "c", "op": "weak_order", "levels": [2, 2], "variant": "monoid"},
        {"name": "d", "op": "product", "a": "b", "b": "c"},
        {"name": "e", "op": "sp", "expr": "s(.,p(.,.))"},
        {"name": "f", "op": "recognize", "poset": poset_to_json(n_poset()), "class": "monoid"},
        {"name": "g", "op": "retract", "of": "f"},
    ]
    path = tmp_path / "pipe.json"
    path.write_text(json.dumps(pipeline))
    code, rec = run(capsys, "construct", "--pipeline", str(path))
    assert code == 0
    assert rec["verdicts"] == {"a": "full", "b": "full_monoid", "c": "monoid", "d": "monoid",
                               "e": "full_monoid", "f": "monoid", "g": "full"}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([{"op": "k_blowup", "of": "nothing", "k": 2}]))
    code, _ = run(capsys, "construct", "--pipeline", str(bad))
    assert code == 1


def test_cli_numsem_and_autoequiv(capsys, tmp_path):
    dot = tmp_path / "ns.dot"
    code, rec = run(capsys, "numsem", "--gens", "3,5", "--window", "13", "--dot", str(dot))
    assert code == 0 and dot.read_text().count("->") == 12
    code, rec = run(capsys, "autoequiv", "--gens", "3,5", "--window", "13", "--roundtrip")
    assert code == 0
    code, rec = run(capsys, "autoequiv", "--lex", "3,4")
    assert code == 0
    code, rec = run(capsys, "numsem", "--gens", "1,-1", "--window", "3")
    assert code == 1


def test_cli_export(capsys, n_file, tmp_path):
    out = tmp_path / "n.dot"
    code, rec = run(capsys, "export", "--in", str(n_file), "--out", str(out))
    assert code == 0 and out.read_text().count("->") == 3


def test_module_entry_point(n_file):
    res = subprocess.run([sys.executable, "-m", "cayleyposets", "classify", "--in", str(n_file)],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["command"] == "classify"
