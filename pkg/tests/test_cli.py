import io
import json
import subprocess
import sys

import pytest

from agcheck import __version__
from agcheck.cli import main
from agcheck.samples import FIXTURES, LANGUAGES, sample_path


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_check_clean_and_dirty():
    code, text = run("check", "sample:ex1")
    assert code == 0 and "role eval: 0 violations" in text and "states expanded" in text
    code, text = run("check", "sample:ex2", "--format", "json")
    assert code == 1
    doc = json.loads(text)
    (v,) = doc["roles"][0]["violations"]
    assert (v["kind"], v["production"], v["index"], v["attr"]) == ("MissingAttr", "program", 1, "val")


def test_check_accepts_file_path():
    code, _ = run("check", str(sample_path("ex2")))
    assert code == 1


def test_input_errors_exit_2(capsys):
    assert run("check", str(sample_path("malformed")))[0] == 2
    assert run("check", "sample:nope")[0] == 2
    assert run("check", "/does/not/exist.json")[0] == 2
    assert run("check", "sample:ex1", "--role", "nope")[0] == 2
    assert "agcheck:" in capsys.readouterr().err


def test_budget_exit_3():
    assert run("check", "sample:expr", "--no-opt1", "--no-opt2", "--max-states", "100")[0] == 3


@pytest.mark.parametrize("name", LANGUAGES + FIXTURES)
def test_flags_do_not_change_findings(name):
    docs = []
    for flags in ([], ["--no-opt1"], ["--no-opt2"], ["--no-opt1", "--no-opt2"]):
        code, text = run("check", f"sample:{name}", "--format", "json", *flags)
        roles = json.loads(text)["roles"]
        for r in roles:
            r.pop("stats")
            # witnesses are node ids of the configuration's own graph
            for v in r["violations"]:
                v.pop("witness")
        docs.append((code, roles))
    assert all(d == docs[0] for d in docs)


def test_dynamic_check_warning_is_not_a_finding():
    code, text = run("check", "sample:stateMachine", "--format", "json")
    assert code == 0
    assert json.loads(text)["roles"][0]["violations"][0]["kind"] == "AttrTypeDynamicallyChecked"


def test_dot_output(tmp_path):
    target = tmp_path / "g.dot"
    code, _ = run("check", "sample:ex1", "--dot", str(target))
    assert code == 0 and target.read_text().startswith("digraph")


def test_postorder_command():
    assert run("postorder", "sample:postorder_gap")[0] == 0
    code, text = run("postorder", "sample:straight_line")
    assert code == 1 and "neg does not provide val required by program[1]" in text
    code, text = run("postorder", "sample:straight_line", "--format", "json")
    assert {d["kind"] for d in json.loads(text)["roles"][0]["diagnostics"]} == {"postorder-missing"}


def test_mutate_command():
    code, text = run("mutate", "sample:ex1", "--oracle")
    assert code == 0 and "Language" in text and "oracle-confirmed faulty mutants (ex1): 2" in text
    code, text = run("mutate", "sample:ex1", "--format", "json")
    assert json.loads(text)[0]["generated"] == 2
    assert run("mutate", "sample:ex2")[0] == 2


def test_oracle_command():
    assert run("oracle", "sample:ex1")[0] == 0
    code, text = run("oracle", "sample:ex2", "--format", "json")
    assert code == 1
    assert json.loads(text)["roles"][0]["faults"] == [
        {"kind": "MissingAttr", "production": "program", "index": 1, "attr": "val"}
    ]


def test_oracle_unproducible_start(tmp_path):
    doc = {"types": [], "nonterminals": ["Program", "Expr"], "roles": [{"name": "eval", "mode": "manual"}],
           "modules": [{"name": "m", "productions": [{"id": "e", "lhs": "Expr", "rhs": [], "actions": {"eval": ""}}]}]}
    path = tmp_path / "empty.json"
    path.write_text(json.dumps(doc))
    assert run("oracle", str(path))[0] == 2


def test_version_and_module_entry():
    with pytest.raises(SystemExit):
        main(["--version"])
    proc = subprocess.run([sys.executable, "-m", "agcheck", "check", "sample:ex1"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0 violations" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "agcheck", "--version"], capture_output=True, text=True)
    assert __version__ in proc.stdout
