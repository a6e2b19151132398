"""Bagged tree ensembles: random forest and extra trees."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .base import Estimator
from .tree import Tree, build_cart


def resolve_max_features(max_features, n_features):
    if max_features is None:
        return n_features
    if max_features == "sqrt":
        return max(1, int(math.sqrt(n_features)))
    if max_features == "log2":
        return max(1, int(math.log2(n_features)))
    if isinstance(max_features, float):
        return max(1, int(max_features * n_features))
    return min(int(max_features), n_features)


def tree_streams(seed, n_trees):
    """One independent generator per tree, derived from the master seed only."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_trees)]


class _Forest(Estimator):
    bootstrap = True
    splitter = "best"

    def fit(self, X, y, seed=0, n_jobs=1):
        p = self.params
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        n, d = X.shape
        mf = resolve_max_features(p["max_features"], d)
        streams = tree_streams(seed, p["n_estimators"])

        def grow(rng):
            if self.bootstrap:
                idx = rng.integers(0, n, size=n)
                Xt, yt = X[idx], y[idx]
            else:
                Xt, yt = X, y
            return build_cart(
                Xt,
                yt,
                max_depth=p["max_depth"],
                min_samples_split=p["min_samples_split"],
                min_samples_leaf=p["min_samples_leaf"],
                max_features=mf,
                splitter=self.splitter,
                rng=rng,
            )

        if n_jobs and n_jobs > 1:
            with ThreadPoolExecutor(max_workers=n_jobs) as pool:
                self.trees_ = list(pool.map(grow, streams))
        else:
            self.trees_ = [grow(rng) for rng in streams]
        return self

    def tree_votes(self, X):
        X = np.asarray(X, dtype=np.float64)
        return np.array([t.predict_value(X) >= 0.5 for t in self.trees_], dtype=np.int64)

    def predict_score(self, X):
        # fraction of trees voting for class 1
        return self.tree_votes(X).mean(axis=0)

    def get_state(self):
        return {"trees": [t.get_state() for t in self.trees_]}

    def set_state(self, s):
        self.trees_ = [Tree.from_state(t) for t in s["trees"]]
        return self


class RandomForest(_Forest):
    learner_id = "random_forest"


class ExtraTrees(_Forest):
    learner_id = "extra_trees"
    bootstrap = False
    splitter = "random"


class DecisionTree(Estimator):
    learner_id = "decision_tree"

    def fit(self, X, y, seed=0, n_jobs=1):
        p = self.params
        self.tree_ = build_cart(
            X,
            y,
            max_depth=p["max_depth"],
            min_samples_split=p["min_samples_split"],
            min_samples_leaf=p["min_samples_leaf"],
            rng=np.random.default_rng(seed),
        )
        return self

    def predict_score(self, X):
        return self.tree_.predict_value(X)

    def get_state(self):
        return {"tree": self.tree_.get_state()}

    def set_state(self, s):
        self.tree_ = Tree.from_state(s["tree"])
        return self
