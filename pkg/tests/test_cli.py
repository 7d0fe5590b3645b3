import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from piecat.cli import main
from piecat.dsl import parse

SCHEMA = json.loads((resources.files("piecat") / "report.schema.json").read_text(encoding="utf-8"))


def run(tmp_path, *argv):
    report = tmp_path / "report.json"
    code = main(["--report", str(report), *argv])
    doc = json.loads(report.read_text(encoding="utf-8"))
    jsonschema.validate(doc, SCHEMA)
    assert doc["exit_code"] == code
    return code, doc


@pytest.mark.parametrize(
    "argv, code",
    [
        (["check", "terminal"], 0),
        (["check", "transport_single", "--universe", "a,b"], 1),
        (["check", "no_such_file"], 2),
        (["classify", "coherence_fail"], 1),
        (["classify", "aec_proxy_0"], 0),
        (["sigma", "inj_le2", "--budget", "1"], 3),
        (["sigma", "terminal"], 0),
        (["transport", "transport_single", "--universe", "a,b"], 0),
        (["verify", "th23", "--n", "10"], 0),
    ],
)
def test_exit_codes_and_schema(tmp_path, argv, code):
    got, doc = run(tmp_path, *argv)
    assert got == code
    assert doc["command"] == argv[0]


def test_budget_environment_variable(tmp_path, monkeypatch):
    monkeypatch.setenv("PIECAT_BUDGET", "1")
    code, doc = run(tmp_path, "sigma", "inj_le2")
    assert code == 3 and doc["status"] == "unknown"
    monkeypatch.setenv("PIECAT_BUDGET", "soon")
    assert run(tmp_path, "verify", "th23", "--n", "2")[0] == 2


def test_parse_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.cat"
    bad.write_text("category K { objects A $ }\n")
    code, doc = run(tmp_path, "check", str(bad))
    assert code == 2 and "1:24" in doc["message"]


def test_limit_then_check_pipeline(tmp_path):
    out = tmp_path / "ins.cat"
    code, doc = run(tmp_path, "limit", "inserter", "inserter_demo", "F", "G", "--result", "Ins", "-o", str(out))
    assert code == 0
    ws = parse(out.read_text(encoding="utf-8"))
    assert "Ins" in ws.concretes and len(ws.categories["Ins"].objects) == 2
    assert run(tmp_path, "check", str(out), "--name", "Ins")[0] == 0


def test_product_defaults_to_every_concrete_category(tmp_path):
    out = tmp_path / "prod.cat"
    code, _ = run(tmp_path, "limit", "product", "control_pair", "--result", "P", "-o", str(out))
    assert code == 0
    p = parse(out.read_text(encoding="utf-8")).concrete("P")
    assert len(p.cat.objects) == 1
    assert set(p.carrier(p.cat.objects[0])) == {"0:a", "1:b"}


def test_verify_th25_with_figure(tmp_path, capsys):
    fig = tmp_path / "th25.png"
    code, doc = run(tmp_path, "verify", "th25", "--n", "200", "--seed", "7", "--figure", str(fig))
    assert code == 0
    assert fig.is_file() and fig.stat().st_size > 0
    assert doc["outputs"]["figure"] == str(fig)
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split("\t")[0] == "suite" and lines[1].startswith("th25\tpass\t200")


def test_search_candidate_rechecks_in_fresh_process(tmp_path):
    out = tmp_path / "cands"
    code, doc = run(tmp_path, "search29", "--n", "150", "--seed", "3", "--budget", "120", "--out", str(out))
    assert code == 0
    paths = sorted(out.glob("*.cat"))
    assert paths, "seed 3 is known to produce candidates"
    proc = subprocess.run([sys.executable, "-m", "piecat", "recheck29", str(paths[0])], capture_output=True, text=True)
    assert proc.returncode == 1
    assert "recheck29\tfail" in proc.stdout


def test_bundled_candidate_reproduces():
    proc = subprocess.run([sys.executable, "-m", "piecat", "recheck29", "search29_candidate"], capture_output=True, text=True)
    assert proc.returncode == 1
