"""Gradient-boosted trees on the logistic loss (exact greedy splits)."""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from ..errors import DegenerateLabels
from .base import Estimator
from .tree import Tree, build_regression_tree


def logistic_loss(y, raw):
    """Mean binary cross-entropy of raw log-odds scores."""
    return float(np.mean(np.logaddexp(0.0, raw) - y * raw))


def initial_log_odds(y):
    p = float(np.mean(y))
    return float(np.log(p / (1.0 - p)))


def safeguarded_leaf_steps(y, raw, leaf_of, steps, max_halvings=40):
    """Shrink any leaf step that would raise that leaf's logistic loss.

    Leaves own disjoint rows, so keeping every leaf's loss from rising keeps
    the total from rising. Steps that cannot be made safe become zero.
    """
    steps = np.array(steps, dtype=np.float64)
    n_leaves = steps.shape[0]
    before = np.bincount(leaf_of, weights=np.logaddexp(0.0, raw) - y * raw, minlength=n_leaves)
    todo = np.ones(n_leaves, dtype=bool)
    for _ in range(max_halvings):
        new = raw + steps[leaf_of]
        after = np.bincount(leaf_of, weights=np.logaddexp(0.0, new) - y * new, minlength=n_leaves)
        bad = todo & (after > before)
        if not bad.any():
            return steps
        steps[bad] *= 0.5
        todo = bad
    steps[todo] = 0.0
    return steps


class GradientBoosting(Estimator):
    learner_id = "gbdt"

    def fit(self, X, y, seed=0, n_jobs=1):
        p = self.params
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if y.min() == y.max():
            raise DegenerateLabels("gradient boosting needs both classes")
        self.init_ = initial_log_odds(y)
        raw = np.full(y.shape[0], self.init_)
        self.trees_ = []
        self.train_loss_ = [logistic_loss(y, raw)]
        lr = p["learning_rate"]
        for _ in range(p["n_estimators"]):
            prob = expit(raw)
            resid = y - prob
            tree, leaf_of = build_regression_tree(
                X,
                resid,
                max_depth=p["max_depth"],
                min_samples_split=p["min_samples_split"],
                min_samples_leaf=p["min_samples_leaf"],
            )
            n_nodes = tree.node_count
            num = np.bincount(leaf_of, weights=resid, minlength=n_nodes)
            den = np.bincount(leaf_of, weights=prob * (1.0 - prob), minlength=n_nodes)
            newton = np.where(den > 1e-150, num / np.where(den > 1e-150, den, 1.0), 0.0)
            steps = safeguarded_leaf_steps(y, raw, leaf_of, lr * newton)
            is_leaf = tree.feature < 0
            tree.value[is_leaf] = steps[is_leaf]
            raw = raw + tree.value[leaf_of]
            self.trees_.append(tree)
            self.train_loss_.append(logistic_loss(y, raw))
        return self

    def decision_function(self, X):
        X = np.asarray(X, dtype=np.float64)
        raw = np.full(X.shape[0], self.init_)
        for tree in self.trees_:
            raw += tree.predict_value(X)
        return raw

    def predict_score(self, X):
        return expit(self.decision_function(X))

    def get_state(self):
        return {
            "init": self.init_,
            "trees": [t.get_state() for t in self.trees_],
            "train_loss": list(self.train_loss_),
        }

    def set_state(self, s):
        self.init_ = float(s["init"])
        self.trees_ = [Tree.from_state(t) for t in s["trees"]]
        self.train_loss_ = list(s.get("train_loss", []))
        return self
