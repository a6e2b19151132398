"""Five bootstrap-trained members combined by hard majority vote."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBootstrap, DimensionMismatch
from .learners import LearnerSpec, TrainedModel, make_spec, train

MEMBER_IDS = ("hist_gb", "decision_tree", "gbdt", "random_forest", "extra_trees")
N_MEMBERS = len(MEMBER_IDS)
MAX_REDRAWS = 10


def draw_bootstrap(n, seed, sample, attempt=0):
    """Indices of bootstrap sample ``sample`` (redraw number ``attempt``)."""
    rng = np.random.default_rng([seed, sample, attempt])
    return rng.integers(0, n, size=n)


def member_seed(seed, k):
    return int(np.random.SeedSequence([seed, 1000 + k]).generate_state(1, np.uint32)[0])


@dataclass(frozen=True)
class BootstrapPlan:
    n: int
    seed: int
    indices: tuple[np.ndarray, ...]
    attempts: tuple[int, ...]

    def to_dict(self):
        # indices are regenerated from (n, seed, attempts)
        return {"n": self.n, "seed": self.seed, "attempts": list(self.attempts)}

    @classmethod
    def from_dict(cls, d):
        idx = tuple(draw_bootstrap(d["n"], d["seed"], k, a) for k, a in enumerate(d["attempts"]))
        return cls(d["n"], d["seed"], idx, tuple(d["attempts"]))


def bootstrap_indices(n, seed, count=N_MEMBERS) -> BootstrapPlan:
    if n < 1:
        raise ValueError("bootstrap needs n >= 1")
    idx = tuple(draw_bootstrap(n, seed, k) for k in range(count))
    return BootstrapPlan(n, seed, idx, (0,) * count)


@dataclass(frozen=True)
class VotingEnsemble:
    members: tuple[TrainedModel, ...]
    plan: BootstrapPlan
    seed: int

    learner_id = "ensemble"

    @property
    def n_features(self):
        return self.members[0].n_features

    def votes(self, X):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatch(f"ensemble expects {self.n_features} features, got shape {X.shape}")
        return np.stack([m.predict(X) for m in self.members]), single

    def predict_score(self, X):
        """Fraction of members voting for class 1."""
        v, single = self.votes(X)
        s = v.sum(axis=0) / len(self.members)
        return float(s[0]) if single else s

    def predict(self, X):
        v, single = self.votes(X)
        labels = (2 * v.sum(axis=0) > len(self.members)).astype(np.int64)
        return int(labels[0]) if single else labels


def predict_majority(ens: VotingEnsemble, X):
    return ens.predict(X)


def ensemble_score(ens: VotingEnsemble, X):
    return ens.predict_score(X)


def fit_voting_ensemble(
    X,
    y,
    seed,
    member_specs: tuple[LearnerSpec, ...] | None = None,
    n_jobs=1,
) -> VotingEnsemble:
    """Train member k on bootstrap sample k of ``(X, y)``.

    A sample that lost a class is redrawn with the next attempt number, up to
    ``MAX_REDRAWS`` times.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    if n < 1 or np.unique(y).size < 2:
        raise DegenerateBootstrap("training data must contain both classes")
    specs = member_specs or tuple(make_spec(m) for m in MEMBER_IDS)
    if len(specs) % 2 == 0:
        raise ValueError("an odd number of members is required")

    samples, attempts = [], []
    for k in range(len(specs)):
        for attempt in range(MAX_REDRAWS + 1):
            idx = draw_bootstrap(n, seed, k, attempt)
            if np.unique(y[idx]).size == 2:
                break
        else:
            raise DegenerateBootstrap(f"sample {k}: one class missing after {MAX_REDRAWS} redraws")
        samples.append(idx)
        attempts.append(attempt)

    def fit_member(k):
        idx = samples[k]
        return train(specs[k], X[idx], y[idx], seed=member_seed(seed, k))

    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            members = tuple(pool.map(fit_member, range(len(specs))))
    else:
        members = tuple(fit_member(k) for k in range(len(specs)))
    plan = BootstrapPlan(n, seed, tuple(samples), tuple(attempts))
    return VotingEnsemble(members, plan, seed)
