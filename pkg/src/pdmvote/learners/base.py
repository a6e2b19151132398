from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, ClassVar

import numpy as np

from ..errors import DimensionMismatch


class Estimator:
    """Minimal fit/score interface every native learner implements.

    ``predict_score`` returns a confidence for class 1 in [0, 1]; labels are
    derived from it with a uniform ``score >= 0.5`` rule.
    """

    learner_id: ClassVar[str] = ""

    def __init__(self, **params):
        self.params = params

    def fit(self, X, y, seed=0, n_jobs=1):
        raise NotImplementedError

    def predict_score(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)

    def get_state(self) -> dict:
        raise NotImplementedError

    def set_state(self, state: dict):
        raise NotImplementedError


@dataclass(frozen=True)
class LearnerSpec:
    learner_id: str
    hyperparams: dict[str, Any] = field(default_factory=dict)

    def to_dict(self):
        return {"learner_id": self.learner_id, "hyperparams": dict(self.hyperparams)}


@dataclass(frozen=True)
class TrainedModel:
    """A fitted learner plus the metadata needed to reproduce it."""

    spec: LearnerSpec
    seed: int
    n_features: int
    estimator: Estimator = field(repr=False)

    @property
    def learner_id(self):
        return self.spec.learner_id

    def _check(self, X):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatch(f"model expects {self.n_features} features, got shape {X.shape}")
        return X, single

    def predict_score(self, X):
        X, single = self._check(X)
        s = np.clip(self.estimator.predict_score(X), 0.0, 1.0)
        return float(s[0]) if single else s

    def predict(self, X):
        X, single = self._check(X)
        s = np.clip(self.estimator.predict_score(X), 0.0, 1.0)
        labels = (s >= 0.5).astype(np.int64)
        return int(labels[0]) if single else labels
