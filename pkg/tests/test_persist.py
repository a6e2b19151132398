import json

import numpy as np
import pytest

from conftest import blobs
from pdmvote import persist
from pdmvote.ensemble import fit_voting_ensemble
from pdmvote.learners import LEARNER_IDS, make_spec, train

SMALL = {
    "random_forest": {"n_estimators": 8},
    "extra_trees": {"n_estimators": 8},
    "gbdt": {"n_estimators": 10},
    "hist_gb": {"max_iter": 8, "min_samples_leaf": 4},
}


@pytest.fixture(scope="module")
def data():
    rng = np.random.default_rng(3)
    X = rng.random((150, 6))
    y = (X[:, 1] + X[:, 4] + 0.3 * rng.normal(size=150) > 1.0).astype(int)
    Q = rng.random((400, 6)) * 1.2 - 0.1
    return X, y, Q


@pytest.mark.parametrize("lid", LEARNER_IDS)
def test_round_trip_bit_identical(lid, data, tmp_path):
    X, y, Q = data
    model = train(make_spec(lid, **SMALL.get(lid, {})), X, y, seed=12)
    path = tmp_path / f"{lid}.model.json"
    persist.save(model, path)
    back = persist.load(path)
    assert back.spec == model.spec and back.seed == 12 and back.n_features == 6
    assert np.array_equal(back.predict_score(Q), model.predict_score(Q))
    assert np.array_equal(back.predict(Q), model.predict(Q))
    # saving the reloaded model reproduces the document byte for byte
    assert persist.dumps(back) == path.read_text()


def test_ensemble_round_trip(data, tmp_path):
    X, y, Q = data
    specs = tuple(make_spec(m, **SMALL.get(m, {})) for m in ("hist_gb", "decision_tree", "gbdt", "random_forest", "extra_trees"))
    ens = fit_voting_ensemble(X, y, 4, specs)
    persist.save(ens, tmp_path / "e.json")
    doc = json.loads((tmp_path / "e.json").read_text())
    assert doc["format"] == "pdmvote/ensemble" and len(doc["members"]) == 5
    back = persist.load(tmp_path / "e.json")
    assert np.array_equal(back.predict_score(Q), ens.predict_score(Q))
    assert all(np.array_equal(a, b) for a, b in zip(back.plan.indices, ens.plan.indices))


def test_rejects_foreign_documents():
    with pytest.raises(ValueError):
        persist.loads(json.dumps({"format": "something/else"}))
    X, y = blobs(20, 0)
    doc = persist.to_document(train("dummy", X, y))
    doc["version"] = 99
    with pytest.raises(ValueError):
        persist.from_document(doc)
