import csv
import json

import numpy as np
import pytest

from pdmvote import persist
from pdmvote.cli import main
from pdmvote.metrics import ConfusionMatrix, read_cv_grid
from pdmvote.plots import confusion_svg, cv_svg
from pdmvote.preprocess import read_encoded_csv

LIGHT = [
    "learners.random_forest.n_estimators=10",
    "learners.extra_trees.n_estimators=10",
    "learners.gbdt.n_estimators=15",
    "learners.hist_gb.max_iter=10",
    "learners.adaboost.n_estimators=10",
]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def sets(extra=()):
    args = []
    for s in [*LIGHT, *extra]:
        args += ["--set", s]
    return args


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    data = root / "replica.csv"
    assert main(["make-replica", str(data), "--rows", "900", "--replica-seed", "3"]) == 0
    out = root / "run"
    common = ["--out", str(out), *sets([f"dataset={data}"])]
    assert main(["prepare", *common]) == 0
    assert main(["train", "all", *common]) == 0
    assert main(["evaluate", *common]) == 0
    assert main(["rank", *common]) == 0
    return root, data, out, common


def test_prepare_outputs(workspace):
    _, _, out, _ = workspace
    manifest = json.loads((out / "manifest.json").read_text())
    counts = manifest["prepare"]["counts"]
    assert counts["train_before"]["total"] == 630 and counts["test"]["total"] == 270
    assert counts["train_after"]["0"] == counts["train_after"]["1"] == counts["train_before"]["0"]
    train = read_encoded_csv(out / "train.csv")
    assert train.class_counts() == {0: counts["train_after"]["0"], 1: counts["train_after"]["1"]}
    assert "out" not in manifest["config"]
    assert len(manifest["prepare"]["dataset_digest"]) == 64
    assert "time" not in json.dumps(manifest).lower()


def test_test_split_is_never_oversampled(workspace):
    _, _, out, _ = workspace
    encoded = read_encoded_csv(out / "encoded.csv")
    test = read_encoded_csv(out / "test.csv")
    originals = {tuple(r) for r in encoded.X.tolist()}
    assert all(tuple(r) in originals for r in test.X.tolist())


def test_train_all_writes_13_documents(workspace):
    _, _, out, _ = workspace
    docs = sorted(p.name for p in (out / "models").glob("*.model.json"))
    assert len(docs) == 13
    ens = json.loads((out / "models" / "ensemble.model.json").read_text())
    assert ens["format"] == "pdmvote/ensemble" and len(ens["members"]) == 5


def test_reload_predicts_identically(workspace):
    _, _, out, _ = workspace
    test = read_encoded_csv(out / "test.csv")
    for path in (out / "models").glob("*.model.json"):
        a = persist.load(path)
        b = persist.loads(persist.dumps(a))
        assert np.array_equal(a.predict_score(test.X), b.predict_score(test.X))


def test_metrics_files(workspace):
    _, _, out, _ = workspace
    files = sorted(out.glob("*.metrics.json"))
    assert len(files) == 13
    for f in files:
        assert set(json.loads(f.read_text())) == {"accuracy", "auc", "recall", "precision", "f1"}
    test = read_encoded_csv(out / "test.csv")
    dummy = json.loads((out / "dummy.metrics.json").read_text())
    assert dummy["accuracy"] == np.mean(test.y == 0) and dummy["auc"] == 0.5
    assert (out / "confusion.svg").read_text().startswith("<svg")


def test_ranking_csv(workspace):
    _, _, out, _ = workspace
    with (out / "ranking.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 13 and rows[0]["rank"] == "1"
    scores = [float(r["score"]) for r in rows]
    assert scores == sorted(scores, reverse=True)


def test_rerun_from_manifest_is_byte_identical(workspace, capsys):
    root, _, out, _ = workspace
    again = root / "again"
    cfg = out / "manifest.json"
    for cmd in (["prepare"], ["train", "gbdt"], ["evaluate", "gbdt"]):
        code, _, err = run(capsys, *cmd, "--config", cfg, "--out", again)
        assert code == 0, err
    for name in ("encoded.csv", "train.csv", "test.csv", "scaler.json", "models/gbdt.model.json", "gbdt.metrics.json"):
        assert (again / name).read_bytes() == (out / name).read_bytes()


def test_cv_command(workspace, capsys):
    root, _, out, common = workspace
    cv_out = root / "cv"
    extra = ["--set", "cv.repetitions=2", "--set", "cv.k=3", "--set", "cv.pipeline=decision_tree"]
    code, _, err = run(capsys, "prepare", *common[2:], "--out", cv_out)
    assert code == 0, err
    code, stdout, err = run(capsys, "cv", *common[2:], "--out", cv_out, *extra)
    assert code == 0, err
    printed = json.loads(stdout.strip().splitlines()[-1])
    grid = read_cv_grid(cv_out / "cv_grid.csv")
    assert grid.shape == (2, 3) and printed["shape"] == [2, 3]
    assert abs(printed["mean_accuracy"] - grid.mean()) <= 1e-12
    assert (cv_out / "cv.svg").read_text().count('class="repetition"') == 2


def test_cv_leave_one_out_on_20_rows(tmp_path, capsys):
    from pdmvote import dataio, synth

    ds = synth.generate(3000, seed=1)
    y = ds.labels()
    keep = np.r_[np.flatnonzero(y == 1)[:10], np.flatnonzero(y == 0)[:10]]
    data = tmp_path / "twenty.csv"
    dataio.write_csv(ds.subset(np.sort(keep)), data)
    common = ["--out", tmp_path / "loo", "--set", f"dataset={data}"]
    assert run(capsys, "prepare", *common)[0] == 0
    extra = ["--set", "cv.k=20", "--set", "cv.repetitions=1", "--set", "cv.pipeline=decision_tree"]
    code, _, err = run(capsys, "cv", *common, *extra)
    assert code == 0, err
    grid = read_cv_grid(tmp_path / "loo" / "cv_grid.csv")
    assert grid.shape == (1, 20)
    assert set(np.unique(grid)) <= {0.0, 1.0}


def test_missing_dataset_is_a_clean_error(tmp_path, capsys):
    code, _, err = run(capsys, "prepare", "--out", tmp_path, "--set", f"dataset={tmp_path / 'none.csv'}")
    assert code != 0
    lines = err.strip().splitlines()
    assert len(lines) == 1 and json.loads(lines[0])["error"]


def test_bad_config_key(tmp_path, capsys):
    code, _, err = run(capsys, "prepare", "--out", tmp_path, "--set", "bogus=1")
    assert code == 2 and json.loads(err)["error"] == "ConfigError"


def test_train_before_prepare(tmp_path, capsys):
    code, _, err = run(capsys, "train", "dummy", "--out", tmp_path)
    assert code == 1 and json.loads(err)["error"] == "MissingModel"


def test_evaluate_missing_model(workspace, tmp_path, capsys):
    _, _, out, common = workspace
    fresh = tmp_path / "fresh"
    run(capsys, "prepare", *common[2:], "--out", fresh)
    code, _, err = run(capsys, "evaluate", "knn", "--out", fresh)
    assert code == 1 and json.loads(err)["error"] == "MissingModel"


def test_rank_needs_two_models(tmp_path, capsys):
    (tmp_path / "knn.metrics.json").write_text(json.dumps(dict.fromkeys(["accuracy", "auc", "recall", "precision", "f1"], 0.5)))
    code, _, err = run(capsys, "rank", "--out", tmp_path)
    assert code == 1 and json.loads(err)["error"] == "TooFewModels"


def test_rank_ties_are_ordered_by_name(tmp_path, capsys):
    doc = json.dumps({"accuracy": 0.9, "auc": 0.8, "recall": 0.5, "precision": 0.6, "f1": 0.55})
    for name in ("zeta", "alpha"):
        (tmp_path / f"{name}.metrics.json").write_text(doc)
    assert run(capsys, "rank", "--out", tmp_path)[0] == 0
    rows = list(csv.reader((tmp_path / "ranking.csv").open()))
    assert [r[0] for r in rows[1:]] == ["alpha", "zeta"]
    assert rows[1][1] == rows[2][1] == "0.5"


def test_global_flags_either_side(tmp_path, capsys):
    a = run(capsys, "--out", tmp_path / "a", "rank")
    b = run(capsys, "rank", "--out", tmp_path / "b")
    assert str(tmp_path / "a") in a[2] and str(tmp_path / "b") in b[2]


def test_confusion_svg_layout():
    svg = confusion_svg(ConfusionMatrix(8, 2, 3, 87))
    assert svg.count("<rect") == 4
    for v in ("8", "2", "3", "87"):
        assert f">{v}<" in svg
    assert "Confusion Matrix (Testing Set)" in svg


def test_cv_svg_lines_and_version_comment():
    grid = np.full((5, 5), 0.95)
    svg = cv_svg(grid)
    assert svg.count('class="repetition"') == 5
    assert all(line.count(",") == 5 for line in svg.splitlines() if 'class="repetition"' in line and "points=" in line)
    stripped = [line for line in svg.splitlines() if not line.startswith("<!-- pdmvote")]
    assert stripped == [line for line in cv_svg(grid).splitlines() if not line.startswith("<!-- pdmvote")]
