from __future__ import annotations

import csv
import io
from pathlib import Path

import pytest

from chronicpred.cli import main

SMALL = """
preset = heart
synth.n = 300
model = lr
model = dt
seed = 5
"""


def run(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def test_schema():
    code, text = run("schema", "heart")
    assert code == 0 and len(text.splitlines()) == 14
    code, text = run("schema", "thyroid")
    assert code == 0 and len(text.splitlines()) == 30


def test_unknown_disease(capsys):
    code, _ = run("schema", "lung")
    assert code == 1
    assert "heart" in capsys.readouterr().err


def test_synth(tmp_path):
    code, text = run("synth", "heart", "--n", "1000", "--seed", "3")
    assert code == 0 and len(text.splitlines()) == 1001
    target = tmp_path / "a.csv"
    assert run("synth", "heart", "--n", "1000", "--seed", "3", "--out", str(target))[0] == 0
    assert target.read_text() == text
    assert run("synth", "heart", "--n", "0")[0] == 1
    assert run("synth", "heart", "--n", "10", "--signal", "3")[0] == 1


def test_usage_errors_exit_1():
    assert run()[0] == 1
    assert run("train")[0] == 1
    assert run("frobnicate")[0] == 1


def test_goldens():
    code, text = run("goldens")
    assert code == 0 and "PASS thyroid-lr" in text
    code, text = run("goldens", "--perturb")
    assert code == 3 and "FAIL" in text


@pytest.fixture(scope="module")
def trained(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("cli")
    cfg = root / "small.cfg"
    cfg.write_text(SMALL)
    code, text = run("train", "--config", str(cfg), "--out", str(root / "out"))
    assert code == 0, text
    return root


def test_train_outputs(trained):
    out = trained / "out"
    for rel in ("report.txt", "report.csv", "roc.svg", "results.json", "config.resolved", "run.log",
                "lr/model.ckpt", "lr/roc.csv", "lr/confusion.txt", "dt/model.ckpt"):
        assert (out / rel).is_file(), rel
    assert (out / "lr/roc.csv").read_text().startswith("threshold,fpr,tpr\n")


def test_train_is_reproducible(trained, monkeypatch):
    other = trained / "again"
    monkeypatch.setenv("CHRONICPRED_OUT", str(other))
    assert run("train", "--config", str(trained / "small.cfg"))[0] == 0
    first, second = trained / "out", other / "heart"
    for rel in ("report.txt", "report.csv", "roc.svg", "results.json", "config.resolved", "lr/model.ckpt",
                "dt/model.ckpt"):
        assert (first / rel).read_bytes() == (second / rel).read_bytes(), rel


def test_seed_override_changes_results(trained):
    assert run("train", "--config", str(trained / "small.cfg"), "--seed", "6", "--out", str(trained / "s6"))[0] == 0
    assert (trained / "s6/lr/model.ckpt").read_bytes() != (trained / "out/lr/model.ckpt").read_bytes()


def test_predict(trained, capsys):
    data = trained / "rows.csv"
    assert run("synth", "heart", "--n", "20", "--seed", "1", "--missing-rate", "0.3", "--out", str(data))[0] == 0
    code, text = run("predict", "--model", str(trained / "out/lr/model.ckpt"), "--input", str(data))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 20 and rows[0].keys() == {"row", "score", "predicted"}
    assert [r["row"] for r in rows] == [str(i) for i in range(20)]
    assert all(0.0 <= float(r["score"]) <= 1.0 and r["predicted"] in ("0", "1") for r in rows)

    lines = data.read_text().splitlines()
    thal = lines[0].split(",").index("thal")
    cells = lines[1].split(",")
    cells[thal] = "9"
    lines[1] = ",".join(cells)
    odd = trained / "odd.csv"
    odd.write_text("\n".join(lines) + "\n")
    code, _ = run("predict", "--model", str(trained / "out/dt/model.ckpt"), "--input", str(odd))
    assert code == 0
    assert "unseen categories" in capsys.readouterr().err


def test_predict_errors(trained):
    header = "age,sex\n50,1\n"
    partial = trained / "partial.csv"
    partial.write_text(header)
    model = str(trained / "out/lr/model.ckpt")
    assert run("predict", "--model", model, "--input", str(partial))[0] == 1
    assert run("predict", "--model", str(trained / "nope.ckpt"), "--input", str(partial))[0] == 1
    broken = trained / "broken.ckpt"
    blob = (trained / "out/lr/model.ckpt").read_bytes()
    broken.write_bytes(blob[:-1] + bytes([blob[-1] ^ 1]))
    assert run("predict", "--model", str(broken), "--input", str(partial))[0] == 1


def test_report_rerender(trained):
    out = trained / "rerender"
    code, text = run("report", str(trained / "out"), "--out", str(out))
    assert code == 0
    for rel in ("report.txt", "report.csv", "roc.svg", "results.json"):
        assert (out / rel).read_bytes() == (trained / "out" / rel).read_bytes()
    bad = trained / "bad.json"
    bad.write_text("{}")
    assert run("report", str(bad))[0] == 1


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("disease = heart\nmodel = lr\nimpute.column.chol = mode\n")
    assert run("train", "--config", str(cfg), "--out", str(tmp_path / "o"))[0] == 1
    assert "chol" in capsys.readouterr().err


def test_divergence_is_runtime_error(tmp_path):
    cfg = tmp_path / "hot.cfg"
    cfg.write_text("preset = heart\nsynth.n = 200\nmodel = nn\nmodel.nn.learning_rate = 1e300\n")
    assert run("train", "--config", str(cfg), "--out", str(tmp_path / "o"))[0] == 2
