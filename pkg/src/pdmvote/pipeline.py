"""End-to-end steps shared by the CLI and the acceptance checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dataio
from .config import RunConfig
from .ensemble import MEMBER_IDS, fit_voting_ensemble
from .learners import LEARNER_IDS, train
from .metrics import CvConfig
from .preprocess import EncodedMatrix, ScalerParams, SmoteConfig, encode_dataset, fit_minmax, smote_oversample

SELECTORS = (*LEARNER_IDS, "ensemble", "all")


@dataclass(frozen=True)
class Prepared:
    scaler: ScalerParams
    encoded: EncodedMatrix
    split: dataio.DataSplit
    train: EncodedMatrix
    balanced: EncodedMatrix
    test: EncodedMatrix

    def counts(self):
        def c(em):
            d = em.class_counts()
            return {"0": d[0], "1": d[1], "total": len(em)}

        return {"train_before": c(self.train), "train_after": c(self.balanced), "test": c(self.test)}


def split_config(cfg: RunConfig):
    return dataio.SplitConfig(cfg.split.train_fraction, cfg.seed_for("split"), cfg.split.stratified)


def smote_config(cfg: RunConfig):
    return SmoteConfig(cfg.smote.k_neighbors, cfg.seed_for("smote"))


def prepare(ds: dataio.CanonicalDataset, cfg: RunConfig) -> Prepared:
    """Scale and encode, split, then SMOTE-balance the training part only."""
    split = dataio.train_test_split(ds, split_config(cfg))
    phys = ds.physical_matrix()
    fit_rows = phys if cfg.scaler.fit_on == "full" else phys[split.train_indices]
    scaler = fit_minmax(fit_rows)
    encoded = encode_dataset(ds, scaler)
    train_part = encoded.take(split.train_indices)
    test_part = encoded.take(split.test_indices)
    balanced = smote_oversample(train_part, smote_config(cfg))
    return Prepared(scaler, encoded, split, train_part, balanced, test_part)


def expand_selector(selector):
    if selector not in SELECTORS:
        raise ValueError(f"unknown model {selector!r}; choose one of {', '.join(SELECTORS)}")
    if selector == "all":
        return [*LEARNER_IDS, "ensemble"]
    return [selector]


def fit_model(name, cfg: RunConfig, X, y, seed=None):
    """Fit a learner id or ``"ensemble"`` with the config's hyperparameters."""
    if name == "ensemble":
        specs = tuple(cfg.learner_spec(m) for m in MEMBER_IDS)
        seed = cfg.seed_for("ensemble") if seed is None else seed
        return fit_voting_ensemble(X, y, seed, specs, cfg.ensemble.n_jobs)
    seed = cfg.seed if seed is None else seed
    return train(cfg.learner_spec(name), X, y, seed=seed, n_jobs=cfg.n_jobs)


def cv_trainer(cfg: RunConfig):
    name = cfg.cv.pipeline

    def fit(X, y, seed):
        return fit_model(name, cfg, X, y, seed)

    return fit


def cv_data(em: EncodedMatrix, cfg: RunConfig) -> EncodedMatrix:
    """Rows used for cross-validation; a stratified subsample when ``cv.max_rows`` is set."""
    if cfg.cv.max_rows and cfg.cv.max_rows < len(em):
        frac = cfg.cv.max_rows / len(em)
        sub = dataio.train_test_split(em.y, dataio.SplitConfig(frac, cfg.seed_for("cv"), True))
        return em.take(sub.train_indices)
    return em


def cv_config(cfg: RunConfig) -> CvConfig:
    return CvConfig(cfg.cv.k, cfg.cv.repetitions, cfg.seed_for("cv"), cfg.cv.n_jobs)


def test_majority_fraction(y):
    y = np.asarray(y)
    return max(np.sum(y == 0), np.sum(y == 1)) / y.size
