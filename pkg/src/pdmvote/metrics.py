"""Binary classification metrics, ROC/AUC and repeated k-fold cross-validation.

Class 1 (machine failure) is the positive class throughout.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.stats import rankdata

from .errors import BadK, CvFoldError, LengthMismatch, PdmError, SingleClass
from .preprocess import EncodedMatrix, SmoteConfig, smote_oversample

METRIC_KEYS = ("accuracy", "auc", "recall", "precision", "f1")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    auc: float | None
    recall: float
    precision: float
    f1: float

    def to_dict(self):
        return {k: getattr(self, k) for k in METRIC_KEYS}

    def to_json(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def from_dict(cls, d):
        missing = set(METRIC_KEYS) - set(d)
        if missing:
            raise ValueError(f"metrics document lacks {sorted(missing)}")
        return cls(**{k: d[k] for k in METRIC_KEYS})


def _binary(v, name):
    a = np.asarray(v)
    if a.ndim != 1:
        raise ValueError(f"{name} must be 1-D")
    return a.astype(np.int64)


def confusion_matrix(y_true, y_pred) -> ConfusionMatrix:
    t = _binary(y_true, "y_true")
    p = _binary(y_pred, "y_pred")
    if t.shape != p.shape:
        raise LengthMismatch(f"y_true has {t.shape[0]} entries, y_pred {p.shape[0]}")
    if t.size == 0:
        raise LengthMismatch("empty label vectors")
    tp = int(np.sum((t == 1) & (p == 1)))
    fp = int(np.sum((t == 0) & (p == 1)))
    fn = int(np.sum((t == 1) & (p == 0)))
    return ConfusionMatrix(tp, fp, fn, t.size - tp - fp - fn)


def compute_metrics(cm: ConfusionMatrix, auc: float | None = None) -> MetricsReport:
    """Accuracy, recall, precision and F1; zero denominators give 0."""
    if cm.total <= 0:
        raise ValueError("empty confusion matrix")
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = (cm.tp + cm.tn) / cm.total
    return MetricsReport(accuracy, auc, recall, precision, f1)


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray


def _check_scores(y_true, scores):
    y = _binary(y_true, "y_true")
    s = np.asarray(scores, dtype=np.float64)
    if s.shape != y.shape:
        raise LengthMismatch(f"{y.shape[0]} labels but {s.shape[0]} scores")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    P = int(y.sum())
    N = y.size - P
    if P == 0 or N == 0:
        raise SingleClass("ROC needs both classes present")
    return y, s, P, N


def roc_curve(y_true, scores) -> RocCurve:
    """ROC points for thresholds at each distinct score, highest first.

    A row counts as positive when ``score >= threshold``. Tied scores become a
    single point. The first point is (0, 0) at threshold +inf.
    """
    y, s, P, N = _check_scores(y_true, scores)
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]
    last_of_run = np.flatnonzero(np.r_[s_sorted[1:] != s_sorted[:-1], True])
    tp = np.cumsum(y_sorted)[last_of_run]
    fp = (last_of_run + 1) - tp
    fpr = np.r_[0.0, fp / N]
    tpr = np.r_[0.0, tp / P]
    thr = np.r_[np.inf, s_sorted[last_of_run]]
    return RocCurve(fpr, tpr, thr)


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under an ROC curve."""
    x, yv = curve.fpr, curve.tpr
    return float(np.sum((x[1:] - x[:-1]) * (yv[1:] + yv[:-1]) / 2.0))


def auc_rank(y_true, scores) -> float:
    """Mann-Whitney form: (concordant pairs + ties / 2) / (P * N)."""
    y, s, P, N = _check_scores(y_true, scores)
    ranks = rankdata(s)
    return float((ranks[y == 1].sum() - P * (P + 1) / 2.0) / (P * N))


def roc_auc(y_true, scores) -> float:
    return auc(roc_curve(y_true, scores))


def evaluate(model, X, y) -> tuple[MetricsReport, ConfusionMatrix]:
    """Metrics for any object with ``predict`` and ``predict_score``."""
    pred = model.predict(X)
    cm = confusion_matrix(y, pred)
    y = np.asarray(y)
    a = roc_auc(y, model.predict_score(X)) if 0 < y.sum() < y.size else None
    return compute_metrics(cm, a), cm


# -- cross-validation ------------------------------------------------------------

def kfold_partition(n, k, seed) -> list[np.ndarray]:
    """Shuffle ``range(n)`` and cut it into ``k`` folds whose sizes differ by at most one."""
    if not (isinstance(k, (int, np.integer)) and 2 <= k <= n):
        raise BadK(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, k)]


@dataclass(frozen=True)
class CvConfig:
    k: int = 5
    repetitions: int = 5
    seed: int = 42
    n_jobs: int = 1

    def __post_init__(self):
        if self.k < 2:
            raise BadK("k must be >= 2")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


@dataclass(frozen=True)
class CvResult:
    grid: np.ndarray
    folds: tuple[tuple[np.ndarray, ...], ...]

    @property
    def mean(self):
        return float(self.grid.mean())

    def to_csv(self, path):
        write_cv_grid(self.grid, path)


def write_cv_grid(grid, path):
    grid = np.asarray(grid)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["repetition", *(f"fold{j + 1}" for j in range(grid.shape[1]))])
        for r, row in enumerate(grid.tolist(), start=1):
            w.writerow([r, *(repr(v) for v in row)])


def read_cv_grid(path):
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))[1:]
    return np.array([[float(v) for v in row[1:]] for row in rows])


def fold_seeds(seed, repetitions, k):
    ss = np.random.SeedSequence(seed)
    rep_seqs = ss.spawn(repetitions)
    out = []
    for rs in rep_seqs:
        part_seed = int(rs.generate_state(1, np.uint32)[0])
        fold = [int(s.generate_state(1, np.uint32)[0]) for s in rs.spawn(k)]
        out.append((part_seed, fold))
    return out


Trainer = Callable[[np.ndarray, np.ndarray, int], object]


def repeated_cv(
    train_fn: Trainer,
    data: EncodedMatrix,
    cfg: CvConfig = CvConfig(),
    smote: SmoteConfig | None = SmoteConfig(),
) -> CvResult:
    """Repeated k-fold accuracy.

    For every repetition the rows are reshuffled into ``cfg.k`` folds. For each
    fold the remaining folds are SMOTE-balanced (when ``smote`` is given) and
    handed to ``train_fn(X, y, seed)``, which returns something with
    ``predict``. The held-out fold is scored as-is.
    """
    X, y = data.X, data.y
    n = X.shape[0]
    if np.unique(y).size < 2:
        raise SingleClass("cross-validation data needs both classes")
    if cfg.k > n:
        raise BadK(f"k={cfg.k} exceeds n={n}")
    seeds = fold_seeds(cfg.seed, cfg.repetitions, cfg.k)
    partitions = tuple(tuple(kfold_partition(n, cfg.k, ps)) for ps, _ in seeds)

    def run(task):
        r, j = task
        test_idx = partitions[r][j]
        train_idx = np.concatenate([f for i, f in enumerate(partitions[r]) if i != j])
        fold_seed = seeds[r][1][j]
        try:
            train_part = EncodedMatrix(X[train_idx], y[train_idx])
            if smote is not None:
                train_part = smote_oversample(
                    train_part,
                    SmoteConfig(smote.k_neighbors, fold_seed, smote.integer_columns),
                )
            model = train_fn(train_part.X, train_part.y, fold_seed)
            pred = np.asarray(model.predict(X[test_idx]))
        except PdmError as exc:
            raise CvFoldError(r, j, exc) from exc
        return float(np.mean(pred == y[test_idx]))

    tasks = [(r, j) for r in range(cfg.repetitions) for j in range(cfg.k)]
    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            accs = list(pool.map(run, tasks))
    else:
        accs = [run(t) for t in tasks]
    return CvResult(np.array(accs).reshape(cfg.repetitions, cfg.k), partitions)
