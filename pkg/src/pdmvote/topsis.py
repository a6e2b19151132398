"""TOPSIS ranking of alternatives by closeness to the ideal solution."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .metrics import METRIC_KEYS


@dataclass(frozen=True)
class DecisionMatrix:
    alternatives: tuple[str, ...]
    criteria: tuple[str, ...]
    values: np.ndarray
    weights: np.ndarray
    benefit: tuple[bool, ...]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        object.__setattr__(self, "criteria", tuple(self.criteria))
        object.__setattr__(self, "benefit", tuple(bool(b) for b in self.benefit))
        m, n = len(self.alternatives), len(self.criteria)
        if v.shape != (m, n):
            raise ValueError(f"values shape {v.shape} != ({m}, {n})")
        if m < 2:
            raise ValueError("TOPSIS needs at least two alternatives")
        if np.isnan(v).any() or not np.isfinite(v).all():
            raise ValueError("decision matrix contains NaN or infinite values")
        if (v < 0).any():
            raise ValueError("decision matrix values must be non-negative")
        if w.shape != (n,) or len(self.benefit) != n:
            raise ValueError("one weight and one orientation flag per criterion")
        if (w < 0).any() or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must be non-negative and sum to 1, got sum {w.sum()!r}")

    @classmethod
    def equal_weights(cls, alternatives, criteria, values):
        n = len(criteria)
        return cls(alternatives, criteria, values, np.full(n, 1.0 / n), (True,) * n)


@dataclass(frozen=True)
class TopsisRanking:
    alternatives: tuple[str, ...]
    scores: np.ndarray
    ranks: np.ndarray
    ideal: np.ndarray
    anti_ideal: np.ndarray

    def table(self):
        """``(name, score, rank)`` rows ordered by rank, then name."""
        rows = zip(self.alternatives, self.scores.tolist(), self.ranks.tolist())
        return sorted(rows, key=lambda r: (r[2], r[0]))

    def to_csv(self, path):
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["model", "score", "rank"])
            for name, score, rank in self.table():
                w.writerow([name, repr(score), rank])


def vector_normalize(column):
    """Divide by the Euclidean norm; an all-zero column is returned unchanged."""
    c = np.asarray(column, dtype=np.float64)
    norm = np.sqrt(np.sum(c * c, axis=0))
    return c / np.where(norm > 0, norm, 1.0)


def competition_ranks(scores):
    """1 = best; equal scores share the lower rank (1, 2, 2, 4)."""
    s = np.asarray(scores)
    return np.array([1 + int(np.sum(s > v)) for v in s], dtype=np.int64)


def topsis_rank(dm: DecisionMatrix) -> TopsisRanking:
    weighted = vector_normalize(dm.values) * dm.weights
    benefit = np.array(dm.benefit)
    ideal = np.where(benefit, weighted.max(axis=0), weighted.min(axis=0))
    anti = np.where(benefit, weighted.min(axis=0), weighted.max(axis=0))
    d_plus = np.sqrt(np.sum((weighted - ideal) ** 2, axis=1))
    d_minus = np.sqrt(np.sum((weighted - anti) ** 2, axis=1))
    denom = d_plus + d_minus
    scores = np.divide(d_minus, denom, out=np.full_like(denom, 0.5), where=denom > 0)
    return TopsisRanking(dm.alternatives, scores, competition_ranks(scores), ideal, anti)


def matrix_from_reports(reports: dict, weights=None, criteria=METRIC_KEYS) -> DecisionMatrix:
    """Build a decision matrix from ``{model: MetricsReport | dict}``.

    A missing AUC counts as 0.5, the value of an uninformative scorer.
    """
    names = sorted(reports)
    rows = []
    for name in names:
        r = reports[name]
        d = r.to_dict() if hasattr(r, "to_dict") else dict(r)
        rows.append([0.5 if d.get(c) is None else float(d[c]) for c in criteria])
    n = len(criteria)
    w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=np.float64)
    return DecisionMatrix(tuple(names), tuple(criteria), np.array(rows), w, (True,) * n)
