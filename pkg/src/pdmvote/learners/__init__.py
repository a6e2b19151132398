"""Native implementations of the twelve base classifiers.

``DEFAULT_HYPERPARAMS`` is the single table of defaults. Values listed for a
learner in the reference experiment are used as given; the rest are
conventional choices (shrinkage 0.1, 255 bins, 31 leaves, k = 5, ...).
"""

from __future__ import annotations

from types import MappingProxyType

import numpy as np

from .base import Estimator, LearnerSpec, TrainedModel
from .baselines import (
    AdaBoost,
    Dummy,
    GaussianNB,
    KNeighbors,
    LinearDiscriminant,
    LogisticRegression,
    QuadraticDiscriminant,
)
from .boosting import GradientBoosting
from .forest import DecisionTree, ExtraTrees, RandomForest
from .hist import HistGradientBoosting

LEARNER_IDS = (
    "hist_gb",
    "gbdt",
    "random_forest",
    "decision_tree",
    "extra_trees",
    "knn",
    "adaboost",
    "lda",
    "logreg",
    "dummy",
    "gnb",
    "qda",
)

DISPLAY_NAMES = MappingProxyType(
    {
        "hist_gb": "Light Gradient Boosting Machine",
        "gbdt": "Gradient Boosting Classifier",
        "random_forest": "Random Forest Classifier",
        "decision_tree": "Decision Tree Classifier",
        "extra_trees": "Extra Trees Classifier",
        "knn": "K Neighbors Classifier",
        "adaboost": "Ada Boost Classifier",
        "lda": "Linear Discriminant Analysis",
        "logreg": "Logistic Regression",
        "dummy": "Dummy Classifier",
        "gnb": "Naive Bayes",
        "qda": "Quadratic Discriminant Analysis",
        "ensemble": "Proposed Ensemble Model",
    }
)

DEFAULT_HYPERPARAMS = MappingProxyType(
    {
        "hist_gb": {
            "max_depth": 20,
            "max_iter": 50,
            "learning_rate": 0.1,
            "max_leaf_nodes": 31,
            "max_bins": 255,
            "min_samples_leaf": 20,
            "min_hessian": 1e-3,
            "l2_regularization": 0.0,
        },
        "gbdt": {
            "n_estimators": 100,
            "learning_rate": 0.1,
            "max_depth": 3,
            "min_samples_split": 4,
            "min_samples_leaf": 1,
        },
        "random_forest": {
            "n_estimators": 100,
            "criterion": "gini",
            "max_features": "sqrt",
            "max_depth": None,
            "min_samples_split": 2,
            "min_samples_leaf": 1,
        },
        "decision_tree": {
            "criterion": "gini",
            "max_depth": None,
            "min_samples_split": 2,
            "min_samples_leaf": 1,
        },
        "extra_trees": {
            "n_estimators": 100,
            "criterion": "gini",
            "max_features": "sqrt",
            "max_depth": None,
            "min_samples_split": 2,
            "min_samples_leaf": 1,
        },
        "knn": {"n_neighbors": 5, "metric": "minkowski", "p": 2, "leaf_size": 20},
        "adaboost": {"n_estimators": 50, "learning_rate": 0.5},
        "lda": {"shrinkage": "auto"},
        "logreg": {"penalty": "l2", "C": 1.0, "tol": 1e-4, "max_iter": 100},
        "dummy": {"strategy": "most_frequent"},
        "gnb": {"var_smoothing": 1e-9},
        "qda": {"tol": 1e-4, "reg_param": 0.0},
    }
)

ESTIMATORS = MappingProxyType(
    {
        cls.learner_id: cls
        for cls in (
            HistGradientBoosting,
            GradientBoosting,
            RandomForest,
            DecisionTree,
            ExtraTrees,
            KNeighbors,
            AdaBoost,
            LinearDiscriminant,
            LogisticRegression,
            Dummy,
            GaussianNB,
            QuadraticDiscriminant,
        )
    }
)


def _check_params(learner_id, hp):
    def positive_int(key, minimum=1):
        v = hp.get(key)
        if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < minimum:
            raise ValueError(f"{learner_id}.{key} must be an integer >= {minimum}, got {v!r}")

    for key in ("n_estimators", "max_iter", "n_neighbors", "max_leaf_nodes"):
        if key in hp:
            positive_int(key, 2 if key == "max_leaf_nodes" else 1)
    if "min_samples_split" in hp:
        positive_int("min_samples_split", 2)
    if "min_samples_leaf" in hp:
        positive_int("min_samples_leaf", 1)
    if hp.get("max_depth") is not None:
        positive_int("max_depth", 1)
    if "max_bins" in hp:
        positive_int("max_bins", 2)
        if hp["max_bins"] > 255:
            raise ValueError(f"{learner_id}.max_bins must be <= 255")
    if "learning_rate" in hp and not hp["learning_rate"] > 0:
        raise ValueError(f"{learner_id}.learning_rate must be positive")
    if hp.get("criterion", "gini") != "gini":
        raise ValueError(f"{learner_id}: only the gini criterion is supported")
    if learner_id == "knn" and hp["metric"] != "minkowski":
        raise ValueError("knn.metric must be 'minkowski'")
    if learner_id == "dummy" and hp["strategy"] != "most_frequent":
        raise ValueError("dummy.strategy must be 'most_frequent'")
    if learner_id == "logreg" and hp["penalty"] not in ("l2", "none"):
        raise ValueError("logreg.penalty must be 'l2' or 'none'")


def make_spec(learner_id, **overrides) -> LearnerSpec:
    """Default hyperparameters for ``learner_id`` with validated overrides."""
    if learner_id not in DEFAULT_HYPERPARAMS:
        raise ValueError(f"unknown learner {learner_id!r}; expected one of {', '.join(LEARNER_IDS)}")
    hp = dict(DEFAULT_HYPERPARAMS[learner_id])
    unknown = set(overrides) - set(hp)
    if unknown:
        raise ValueError(f"unknown hyperparameters for {learner_id}: {sorted(unknown)}")
    hp.update(overrides)
    _check_params(learner_id, hp)
    return LearnerSpec(learner_id, hp)


def train(spec: LearnerSpec | str, X, y, seed=0, n_jobs=1) -> TrainedModel:
    if isinstance(spec, str):
        spec = make_spec(spec)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError(f"bad training shapes X{X.shape} y{y.shape}")
    if X.shape[0] < 1:
        raise ValueError("no training rows")
    est = ESTIMATORS[spec.learner_id](**spec.hyperparams)
    est.fit(X, y, seed=seed, n_jobs=n_jobs)
    return TrainedModel(spec, int(seed), X.shape[1], est)


__all__ = [
    "DEFAULT_HYPERPARAMS",
    "DISPLAY_NAMES",
    "ESTIMATORS",
    "Estimator",
    "LEARNER_IDS",
    "LearnerSpec",
    "TrainedModel",
    "make_spec",
    "train",
]
