import csv
import json
import os

import pytest

from mrfse import builtin_model, sample_model, save_sample
from mrfse.cli import main
from mrfse.export import read_graph_json
from mrfse.simulation import derive_key


@pytest.fixture
def corr_csv(tmp_path):
    p = tmp_path / "corr.csv"
    p.write_text("x1,x2\n" + "0,0\n" * 50 + "1,1\n" * 50)
    return p


@pytest.fixture
def ex3_csv(tmp_path):
    p = tmp_path / "ex3.csv"
    save_sample(sample_model(builtin_model("example3"), 600, 4), p)
    return p


def test_estimate_correlated_pair(tmp_path, corr_csv):
    out = tmp_path / "g.json"
    assert main(["estimate", "--input", str(corr_csv), "--c", "1", "--out", str(out)]) == 0
    doc = read_graph_json(out)
    assert doc["edges"] == [["x1", "x2"]]
    assert doc["neighborhoods"]["x1"]["neighborhood"] == ["x2"]
    assert doc["manifest"]["command"] == "estimate"
    assert len(doc["manifest"]["input_digest"]) == 64


def test_estimate_invalid_c(tmp_path, corr_csv, capsys):
    code = main(["estimate", "--input", str(corr_csv), "--c", "0", "--out", str(tmp_path / "g.json")])
    assert code == 2
    assert "penalty constant must be positive" in capsys.readouterr().err


def test_estimate_bad_input(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n0,1\n1\n")
    assert main(["estimate", "--input", str(bad), "--c", "1", "--out", str(tmp_path / "g.json")]) == 3
    assert "input" in capsys.readouterr().err
    assert main(["estimate", "--input", str(tmp_path / "nope.csv"), "--c", "1", "--out", str(tmp_path / "g.json")]) == 3


def test_estimate_capacity_error(tmp_path):
    p = tmp_path / "wide.csv"
    p.write_text("a\n" + "\n".join(str(i) for i in range(300)) + "\n")
    assert main(["estimate", "--input", str(p), "--c", "1", "--out", str(tmp_path / "g.json")]) == 4


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["estimate", "--c", "1"])
    assert exc.value.code == 2


def test_and_edges_subset_of_or(tmp_path, ex3_csv):
    edges = {}
    for mode in ("and", "or"):
        out = tmp_path / f"{mode}.json"
        assert main(["estimate", "--input", str(ex3_csv), "--c", "0.5", "--mode", mode, "--out", str(out)]) == 0
        edges[mode] = {tuple(e) for e in json.loads(out.read_text())["edges"]}
    assert edges["and"] <= edges["or"]


def test_dot_output(tmp_path, corr_csv):
    out, dot = tmp_path / "g.json", tmp_path / "g.dot"
    assert main(["estimate", "--input", str(corr_csv), "--c", "1", "--out", str(out), "--dot", str(dot)]) == 0
    text = dot.read_text()
    assert '"x1" -- "x2";' in text and text.startswith("// manifest:")
    assert main(["estimate", "--input", str(corr_csv), "--c", "1", "--format", "dot", "--out", str(dot)]) == 0


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_simulate(tmp_path):
    out = tmp_path / "sim.csv"
    args = ["simulate", "--model", "example3", "--n", "100", "300", "--c-list", "0.5", "1",
            "--runs", "3", "--seed", "8", "--out", str(out)]
    assert main(args) == 0
    rows = read_csv(out)
    per_run = [r for r in rows if r["run"] != "mean"]
    means = [r for r in rows if r["run"] == "mean"]
    assert len(per_run) == 2 * 2 * 2 * 3 and len(means) == 2 * 2 * 2
    assert list(rows[0]) == ["model", "n", "c", "mode", "run", "seed", "ue", "oe", "te"]
    # a row's seed reproduces its sample
    r = per_run[0]
    assert int(r["seed"]) == derive_key(8, (int(r["run"]) << 32) | int(r["n"]))
    for m in means:
        group = [float(r["te"]) for r in per_run if (r["n"], r["c"], r["mode"]) == (m["n"], m["c"], m["mode"])]
        assert len(group) == 3
        assert float(m["te"]) == pytest.approx(sum(group) / 3, abs=1e-15)
    manifest = json.loads((tmp_path / "sim.csv.manifest.json").read_text())
    assert manifest["seed"] == 8 and manifest["command"] == "simulate"


def test_simulate_model_file(tmp_path):
    mfile = tmp_path / "chain.json"
    assert main(["export-model", "--model", "markov_chain_window(4)", "--out", str(mfile)]) == 0
    out = tmp_path / "s.csv"
    assert main(["simulate", "--model", str(mfile), "--n", "200", "--runs", "2", "--out", str(out)]) == 0
    assert read_csv(out)[0]["model"] == "markov_chain_window(4)"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", "--model", str(bad), "--n", "200", "--runs", "2", "--out", str(out)]) == 3
    assert main(["simulate", "--model", "nonsense", "--n", "200", "--out", str(out)]) == 2


def test_cv(tmp_path, ex3_csv):
    out = tmp_path / "cv.json"
    assert main(["cv", "--input", str(ex3_csv), "--grid", "0.2", "1", "--folds", "5", "--seed", "2", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["chosen_c"] in (0.2, 1.0)
    assert doc["fold_sizes"] == [120] * 5
    assert len(doc["fold_losses"]) == 2 and len(doc["fold_losses"][0]) == 5
    single = tmp_path / "cv1.json"
    assert main(["cv", "--input", str(ex3_csv), "--grid", "0.3", "--folds", "3", "--out", str(single)]) == 0
    assert json.loads(single.read_text())["chosen_c"] == 0.3


def test_cv_530_rows(tmp_path):
    p = tmp_path / "s.csv"
    save_sample(sample_model(builtin_model("markov_chain_window(4)"), 530, 1), p)
    out = tmp_path / "cv.json"
    assert main(["cv", "--input", str(p), "--grid", "0.2", "--folds", "10", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["fold_sizes"] == [53] * 10


def test_diagnose(tmp_path):
    out = tmp_path / "d.csv"
    args = ["diagnose", "--model", "markov_chain_window(3)", "--vertex", "x2", "--cond-set", "x1", "x3",
            "--config", "0", "0", "--delta", "2", "--n", "1000", "--replications", "200", "--out", str(out)]
    assert main(args) == 0
    row = read_csv(out)[0]
    assert float(row["bound_value"]) == pytest.approx(3.817e-4, abs=5e-8)
    assert row["satisfied"] == "true"
    assert os.path.exists(f"{out}.manifest.json")


@pytest.mark.parametrize("extra,code", [
    (["--n", "2", "--delta", "0.5", "--replications", "10"], 2),
    (["--n", "1000", "--delta", "2", "--replications", "0"], 2),
])
def test_diagnose_errors(tmp_path, extra, code):
    base = ["diagnose", "--model", "markov_chain_window(3)", "--vertex", "x2", "--cond-set", "x1",
            "--config", "0", "--out", str(tmp_path / "d.csv")]
    assert main(base + extra) == code


def test_diagnose_zero_probability_config(tmp_path):
    args = ["diagnose", "--model", "markov_chain_window(3)", "--vertex", "x3", "--cond-set", "x1", "x2",
            "--config", "1", "1", "--delta", "2", "--n", "1000", "--replications", "5", "--out", str(tmp_path / "d.csv")]
    assert main(args) == 2


def test_threads_env_fallback(tmp_path, corr_csv, monkeypatch):
    monkeypatch.setenv("MRFSE_THREADS", "0")
    assert main(["estimate", "--input", str(corr_csv), "--c", "1", "--out", str(tmp_path / "g.json")]) == 2
    monkeypatch.setenv("MRFSE_THREADS", "3")
    assert main(["estimate", "--input", str(corr_csv), "--c", "1", "--out", str(tmp_path / "g.json")]) == 0
