import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import blobs
from pdmvote.ensemble import (
    MAX_REDRAWS,
    MEMBER_IDS,
    BootstrapPlan,
    VotingEnsemble,
    bootstrap_indices,
    draw_bootstrap,
    ensemble_score,
    fit_voting_ensemble,
    predict_majority,
)
from pdmvote.errors import DegenerateBootstrap, DimensionMismatch
from pdmvote.learners import make_spec
from pdmvote.learners.base import Estimator, LearnerSpec, TrainedModel


class ColumnVoter(Estimator):
    """Scores each row with one of its own features, so votes are dictated by X."""

    def __init__(self, column):
        super().__init__(column=column)

    def predict_score(self, X):
        return X[:, self.params["column"]]


def dictated_ensemble(order=range(5)):
    members = tuple(TrainedModel(LearnerSpec("stub"), 0, 5, ColumnVoter(k)) for k in order)
    return VotingEnsemble(members, bootstrap_indices(1, 0), 0)


def test_member_roster():
    assert MEMBER_IDS == ("hist_gb", "decision_tree", "gbdt", "random_forest", "extra_trees")


def test_plan_shape():
    plan = bootstrap_indices(13520, 42)
    assert len(plan.indices) == 5
    assert all(len(i) == 13520 and i.min() >= 0 and i.max() < 13520 for i in plan.indices)


def test_plan_single_row():
    plan = bootstrap_indices(1, 3)
    assert all(i.tolist() == [0] for i in plan.indices)


def test_plan_deterministic_and_reloadable():
    a, b = bootstrap_indices(500, 7), bootstrap_indices(500, 7)
    assert all(np.array_equal(x, y) for x, y in zip(a.indices, b.indices))
    c = BootstrapPlan.from_dict(a.to_dict())
    assert all(np.array_equal(x, y) for x, y in zip(a.indices, c.indices))
    assert not np.array_equal(a.indices[0], a.indices[1])


def test_distinct_fraction_near_closed_form():
    n = 13520
    expected = 1 - (1 - 1 / n) ** n
    for idx in bootstrap_indices(n, 42).indices:
        assert abs(np.unique(idx).size / n - expected) <= 0.01


@pytest.mark.parametrize("votes, label", [((1, 1, 1, 0, 0), 1), ((0, 0, 0, 0, 0), 0), ((1, 1, 0, 0, 0), 0)])
def test_majority_examples(votes, label):
    ens = dictated_ensemble()
    x = np.array(votes, dtype=float)
    assert predict_majority(ens, x) == label
    assert ensemble_score(ens, x) == sum(votes) / 5


def test_all_vote_patterns():
    ens = dictated_ensemble()
    X = np.array(list(itertools.product([0.0, 1.0], repeat=5)))
    score, label = ensemble_score(ens, X), predict_majority(ens, X)
    count = X.sum(axis=1)
    assert np.array_equal(score, count / 5)
    assert np.array_equal(label, (count >= 3).astype(int))
    # thresholding the score at 0.5 reproduces the vote, and 0.5 itself never occurs
    assert np.array_equal(label, (score >= 0.5).astype(int))
    assert not np.any(2 * count == 5)
    assert set(np.round(score, 12)) == {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}


@settings(max_examples=50, deadline=None)
@given(perm=st.permutations(range(5)), seed=st.integers(0, 2**32 - 1))
def test_member_order_irrelevant(perm, seed):
    X = np.random.default_rng(seed).random((30, 5))
    a, b = dictated_ensemble(), dictated_ensemble(perm)
    assert np.array_equal(a.predict(X), b.predict(X))
    assert np.array_equal(a.predict_score(X), b.predict_score(X))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        dictated_ensemble().predict(np.zeros((2, 4)))


@pytest.fixture(scope="module")
def small_ensemble():
    X, y = blobs(160, 4, gap=1.5, d=3)
    specs = tuple(
        make_spec(m, **hp)
        for m, hp in zip(
            MEMBER_IDS,
            [{"max_iter": 10, "min_samples_leaf": 5}, {}, {"n_estimators": 10}, {"n_estimators": 10}, {"n_estimators": 10}],
        )
    )
    return X, y, specs, fit_voting_ensemble(X, y, 5, specs)


def test_fit_five_members(small_ensemble):
    X, y, _, ens = small_ensemble
    assert [m.learner_id for m in ens.members] == list(MEMBER_IDS)
    for m, idx in zip(ens.members, ens.plan.indices):
        assert len(idx) == len(y)


def test_fit_matches_mode_of_members(small_ensemble):
    X, y, _, ens = small_ensemble
    Q = np.random.default_rng(0).normal(size=(100, 3)) * 2
    member_votes = np.stack([m.predict(Q) for m in ens.members])
    mode = np.array([np.bincount(col, minlength=2).argmax() for col in member_votes.T])
    assert np.array_equal(ens.predict(Q), mode)
    unanimous = (member_votes.min(axis=0) == member_votes.max(axis=0))
    assert np.array_equal(ens.predict(Q)[unanimous], member_votes[0, unanimous])


def test_fit_deterministic_and_thread_independent(small_ensemble):
    X, y, specs, ens = small_ensemble
    again = fit_voting_ensemble(X, y, 5, specs, n_jobs=3)
    assert np.array_equal(ens.predict_score(X), again.predict_score(X))


def test_two_rows_redraws_until_both_classes():
    X, y = np.array([[0.0], [1.0]]), np.array([0, 1])
    ens = fit_voting_ensemble(X, y, seed=1)
    for idx in ens.plan.indices:
        assert set(y[idx]) == {0, 1}
    assert any(a > 0 for a in ens.plan.attempts)
    assert all(a <= MAX_REDRAWS for a in ens.plan.attempts)
    reloaded = BootstrapPlan.from_dict(ens.plan.to_dict())
    assert all(np.array_equal(a, b) for a, b in zip(reloaded.indices, ens.plan.indices))


def test_degenerate_after_redraws(monkeypatch):
    import pdmvote.ensemble as ens_mod

    monkeypatch.setattr(ens_mod, "MAX_REDRAWS", 1)
    n = 60
    y = np.zeros(n, int)
    y[0] = 1
    # a seed whose first sample misses the lone positive on both draws
    seed = next(s for s in range(10_000) if all(0 not in draw_bootstrap(n, s, 0, a) for a in (0, 1)))
    with pytest.raises(DegenerateBootstrap):
        fit_voting_ensemble(np.zeros((n, 1)), y, seed)


def test_single_class_rejected():
    with pytest.raises(DegenerateBootstrap):
        fit_voting_ensemble(np.zeros((5, 1)), np.ones(5, int), 0)
