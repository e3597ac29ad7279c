import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from vtss.data import LabeledDataset, load_csv, save_csv
from vtss.rng import RngStream
from vtss.sim_models import TwoGaussianModel, gaussian_theta_star

SCHEMA_DIR = None


def _schema(name):
    from importlib import resources
    return json.loads((resources.files("vtss") / "schemas" / name).read_text())


def run_cli(*argv, cwd=None):
    return subprocess.run([sys.executable, "-m", "vtss.cli", *argv],
                          capture_output=True, text=True, cwd=cwd)


@pytest.fixture(scope="module")
def dataset_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "train.csv"
    data = TwoGaussianModel(mu1=[1.0, 0.0]).sample(400, 40, RngStream(1))
    save_csv(data, path)
    return str(path)


def test_simulate_counts_and_round_trip(tmp_path):
    out = tmp_path / "sim.csv"
    res = run_cli("simulate", "--preset", "two-gaussian-mu1-a05",
                  "--n0", "40", "--n1", "2", "--seed", "9", "--out", str(out))
    assert res.returncode == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 43  # header + 42 rows
    back = load_csv(out)
    again = TwoGaussianModel(mu1=[1.0, 0.0]).sample(40, 2, RngStream(9))
    assert np.array_equal(back.features, again.features)


def test_simulate_header_reports_config(tmp_path):
    res = run_cli("simulate", "--preset", "mean-shift-d20-cube",
                  "--n0", "30", "--n1", "5", "--seed", "4",
                  "--out", str(tmp_path / "x.csv"))
    header = json.loads(res.stdout[:res.stdout.rindex("}") + 1])
    assert header["subcommand"] == "simulate"
    assert header["config"]["seed"] == 4
    assert header["config"]["n0"] == 30


def test_simulate_unknown_preset_exit2(tmp_path):
    res = run_cli("simulate", "--preset", "nope", "--out", str(tmp_path / "x.csv"))
    assert res.returncode == 2
    assert "two-gaussian-mu1-a05" in res.stderr  # listing shown


def test_tune_grid_parsing_and_schema(dataset_csv, tmp_path):
    out = tmp_path / "result.json"
    res = run_cli("tune", "--data", dataset_csv, "--generator", "smote",
                  "--k", "5", "--grid", "0:2:21", "--folds", "5",
                  "--repeats", "1", "--objective", "balanced-loss",
                  "--loss", "squared", "--step-rule", "closed_form",
                  "--seed", "42", "--out", str(out))
    assert res.returncode == 0, res.stderr
    payload = json.loads(out.read_text())
    jsonschema.validate(payload, _schema("vtss_result.schema.json"))
    gammas = [g for g, _, _ in payload["cv_curve"]]
    assert len(gammas) == 21 and gammas[0] == 0.0 and gammas[-1] == 2.0


def test_tune_byte_identical_reruns(dataset_csv, tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        res = run_cli("tune", "--data", dataset_csv, "--grid", "0:1:3",
                      "--loss", "squared", "--step-rule", "closed_form",
                      "--seed", "7", "--out", str(out))
        assert res.returncode == 0, res.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_tune_missing_label_exit3(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1.0,2.0\n")
    res = run_cli("tune", "--data", str(bad))
    assert res.returncode == 3
    assert "label" in res.stderr


def test_diagnose_schema_and_regimes(tmp_path):
    # local asymmetry with a biased synthetic CSV: recommendation near 4x
    data = TwoGaussianModel(mu1=[1.0, 0.0]).sample(20000, 2000, RngStream(3))
    train = tmp_path / "train.csv"
    save_csv(data, train)
    syn_rows = TwoGaussianModel(mu1=[0.5, 0.0]).sample_minority(50000, RngStream(5))
    syn = tmp_path / "syn.csv"
    save_csv(LabeledDataset(syn_rows, np.ones(len(syn_rows), dtype=int)), syn)
    star = gaussian_theta_star([1.0, 0.0])
    out = tmp_path / "diag.json"
    res = run_cli("diagnose", "--data", str(train), "--synthetic-data", str(syn),
                  "--loss", "squared",
                  "--theta", f"{float(star[0])!r},{float(star[1])!r}",
                  "--seed", "2", "--out", str(out))
    assert res.returncode == 0, res.stderr
    report = json.loads(out.read_text())
    jsonschema.validate(report, _schema("diagnostics_report.schema.json"))
    for record in report["metrics"]:
        jsonschema.validate(record, _schema("metric_record.schema.json"))
    assert report["regime"] == "local_asymmetry"
    ratio = report["recommended_n_syn"] / (data.n0 - data.n1)
    assert 3.5 <= ratio <= 4.5


def test_diagnose_local_symmetry_recommends_zero(tmp_path):
    res = run_cli("simulate", "--preset", "mean-shift-d20-cube", "--n0", "4000",
                  "--n1", "2000", "--seed", "8", "--out", str(tmp_path / "ms.csv"))
    assert res.returncode == 0
    out = tmp_path / "diag.json"
    res = run_cli("diagnose", "--data", str(tmp_path / "ms.csv"),
                  "--loss", "squared", "--squared-target", "centered",
                  "--generator", "gaussian_fit", "--step-rule", "closed_form",
                  "--seed", "2", "--out", str(out))
    assert res.returncode == 0, res.stderr
    report = json.loads(out.read_text())
    assert report["regime"] == "local_symmetry"
    assert report["recommended_n_syn"] == 0
    assert "unlikely to help" in report["recommendation"]


def test_diagnose_empty_csv_exit3(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    res = run_cli("diagnose", "--data", str(empty))
    assert res.returncode == 3
    assert "line 1" in res.stderr


def test_generate_audit_and_augmented(dataset_csv, tmp_path):
    out = tmp_path / "aug.csv"
    audit = tmp_path / "audit.csv"
    res = run_cli("generate", "--data", dataset_csv, "--generator", "smote",
                  "--count", "60", "--augmented", "--seed", "3",
                  "--out", str(out), "--audit-out", str(audit))
    assert res.returncode == 0, res.stderr
    aug = load_csv(out)
    assert aug.n0 == 400 and aug.n1 == 100
    assert len(audit.read_text().splitlines()) == 61


def test_experiment_writes_tables(tmp_path):
    res = run_cli("experiment", "--preset", "fig2", "--reps", "2",
                  "--seed", "5", "--out", str(tmp_path / "out"))
    assert res.returncode == 0, res.stderr
    for name in ("raw.csv", "summary.csv", "config.json"):
        assert (tmp_path / "out" / name).exists()


def test_presets_lists_everything():
    res = run_cli("presets")
    assert res.returncode == 0
    for name in ("fig2", "two-gaussian-mu1-a05", "paper-sigmoid-d20"):
        assert name in res.stdout
