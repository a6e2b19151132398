"""Feature scaling, type encoding and SMOTE balancing."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataio import CanonicalDataset
from .errors import KTooLarge, TooFewMinority, UnknownCategory

TYPE_ENCODING = {"L": 1, "M": 2, "H": 0}
FEATURE_NAMES = ("F1", "F2", "F3", "F4", "F5", "F6")


@dataclass(frozen=True)
class ScalerParams:
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=np.float64)
        maxs = np.asarray(self.maxs, dtype=np.float64)
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise ValueError("mins and maxs must be 1-D arrays of equal length")
        if np.any(maxs < mins):
            raise ValueError("max < min for some feature")
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @property
    def constant_columns(self):
        return tuple(int(i) for i in np.flatnonzero(self.maxs == self.mins))

    def to_dict(self):
        return {"mins": self.mins.tolist(), "maxs": self.maxs.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["mins"], dtype=np.float64), np.array(d["maxs"], dtype=np.float64))


def fit_minmax(matrix) -> ScalerParams:
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim == 1:
        m = m[:, None]
    if m.shape[0] < 1:
        raise ValueError("need at least one row to fit the scaler")
    if not np.all(np.isfinite(m)):
        raise ValueError("scaler input contains non-finite values")
    params = ScalerParams(m.min(axis=0), m.max(axis=0))
    if params.constant_columns:
        warnings.warn(f"constant columns {params.constant_columns} will scale to 0.0", stacklevel=2)
    return params


def apply_minmax(matrix, params: ScalerParams) -> np.ndarray:
    """``(v - min) / (max - min)`` per column; constant columns map to 0.0."""
    m = np.asarray(matrix, dtype=np.float64)
    squeeze = m.ndim == 1
    if squeeze:
        m = m[:, None]
    if m.shape[1] != params.mins.shape[0]:
        raise ValueError(f"expected {params.mins.shape[0]} columns, got {m.shape[1]}")
    span = params.maxs - params.mins
    safe = np.where(span > 0, span, 1.0)
    out = (m - params.mins) / safe
    out[:, span == 0] = 0.0
    return out[:, 0] if squeeze else out


def inverse_minmax(scaled, params: ScalerParams) -> np.ndarray:
    s = np.asarray(scaled, dtype=np.float64)
    return s * (params.maxs - params.mins) + params.mins


def encode_type(code) -> int:
    try:
        return TYPE_ENCODING[code]
    except (KeyError, TypeError):
        raise UnknownCategory(f"unknown product type {code!r}; expected one of L, M, H") from None


@dataclass(frozen=True)
class EncodedMatrix:
    """Encoded features (F1 type code, F2..F6 scaled) with binary labels.

    ``n_original`` counts the leading rows that came from real records; any
    rows after it were synthesised by SMOTE.
    """

    X: np.ndarray
    y: np.ndarray
    n_original: int | None = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ValueError(f"inconsistent shapes X{X.shape} y{y.shape}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if self.n_original is None:
            object.__setattr__(self, "n_original", X.shape[0])

    def __len__(self):
        return self.X.shape[0]

    def class_counts(self):
        return {0: int(np.sum(self.y == 0)), 1: int(np.sum(self.y == 1))}

    def take(self, indices):
        return EncodedMatrix(self.X[indices], self.y[indices])

    def to_csv(self, path):
        write_encoded_csv(self, path)


def encode_dataset(ds: CanonicalDataset, params: ScalerParams) -> EncodedMatrix:
    f1 = np.array([encode_type(t) for t in ds.type_codes()], dtype=np.float64)
    scaled = apply_minmax(ds.physical_matrix(), params)
    return EncodedMatrix(np.column_stack([f1, scaled]), ds.labels())


def write_encoded_csv(em: EncodedMatrix, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*FEATURE_NAMES[: em.X.shape[1]], "label"])
        for row, label in zip(em.X.tolist(), em.y.tolist()):
            w.writerow([*(repr(v) for v in row), label])


def read_encoded_csv(path) -> EncodedMatrix:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header[-1] != "label":
            raise ValueError(f"{path}: last column must be 'label'")
        rows = [list(map(float, line)) for line in r if line]
    arr = np.array(rows, dtype=np.float64).reshape(-1, len(header))
    return EncodedMatrix(arr[:, :-1], arr[:, -1].astype(np.int64))


# -- nearest neighbours ------------------------------------------------------

def _sq_dists(A, B):
    # exact (A-B)^2 summed; the expanded |a|^2 + |b|^2 - 2ab form is not tie-safe
    return ((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2)


def nearest_neighbors(X, query, k, candidates=None) -> np.ndarray:
    """The ``k`` candidate rows closest to row ``query`` (Euclidean), excluding it.

    Ties in distance go to the lower row index.
    """
    X = np.asarray(X, dtype=np.float64)
    cand = np.arange(X.shape[0]) if candidates is None else np.asarray(candidates)
    cand = cand[cand != query]
    if k < 1 or k > cand.size:
        raise KTooLarge(f"k={k} but only {cand.size} candidate rows besides the query")
    d = ((X[cand] - X[query]) ** 2).sum(axis=1)
    order = np.lexsort((cand, d))
    return cand[order[:k]]


def minority_neighbor_table(Xm, k, chunk=256) -> np.ndarray:
    """``(m, k)`` array: for each row of ``Xm`` its k nearest other rows (tie -> lower index)."""
    m = Xm.shape[0]
    if k >= m:
        raise KTooLarge(f"k={k} needs more than {m} rows")
    out = np.empty((m, k), dtype=np.int64)
    idx = np.arange(m)
    for start in range(0, m, chunk):
        stop = min(start + chunk, m)
        d = _sq_dists(Xm[start:stop], Xm)
        d[np.arange(stop - start), idx[start:stop]] = np.inf
        # stable sort keeps lower index first among equal distances
        out[start:stop] = np.argsort(d, axis=1, kind="stable")[:, :k]
    return out


# -- SMOTE -------------------------------------------------------------------

@dataclass(frozen=True)
class SmoteConfig:
    k_neighbors: int = 5
    seed: int = 42
    # columns holding category codes; rounded back to integers after interpolation
    integer_columns: tuple[int, ...] = (0,)

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")


def interpolate(base, neighbor, delta):
    """``base + delta * (neighbor - base)``, row-wise for 2-D inputs."""
    base = np.asarray(base, dtype=np.float64)
    neighbor = np.asarray(neighbor, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if base.ndim == 2 and delta.ndim == 1:
        delta = delta[:, None]
    return base + delta * (neighbor - base)


@dataclass(frozen=True)
class SmoteDraw:
    """Provenance of each synthetic row, indices into the minority subset."""

    base: np.ndarray
    neighbor: np.ndarray
    delta: np.ndarray


def smote_oversample(data: EncodedMatrix, cfg: SmoteConfig = SmoteConfig(), *, return_draw=False):
    """Add synthetic minority rows until both classes have the same count.

    Original rows are kept verbatim and first; synthetic rows are appended.
    Each one interpolates a uniformly chosen minority row toward one of its
    ``k`` nearest minority neighbours by a uniform fraction.
    """
    X, y = data.X, data.y
    counts = np.bincount(y, minlength=2)
    if counts[0] == 0 or counts[1] == 0:
        raise TooFewMinority("both classes must be present to oversample")
    minority = int(np.argmin(counts)) if counts[0] != counts[1] else 1
    n_min, n_maj = int(counts[minority]), int(counts[1 - minority])
    n_new = n_maj - n_min
    min_rows = np.flatnonzero(y == minority)
    empty = SmoteDraw(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0))
    if n_new == 0:
        out = EncodedMatrix(X.copy(), y.copy(), n_original=len(data))
        return (out, empty) if return_draw else out
    if n_min <= cfg.k_neighbors:
        raise TooFewMinority(f"minority class has {n_min} rows; need more than k={cfg.k_neighbors}")

    Xm = X[min_rows]
    table = minority_neighbor_table(Xm, cfg.k_neighbors)
    rng = np.random.default_rng(cfg.seed)
    base = rng.integers(0, n_min, size=n_new)
    pick = rng.integers(0, cfg.k_neighbors, size=n_new)
    delta = rng.random(n_new)
    nbr = table[base, pick]
    synth = interpolate(Xm[base], Xm[nbr], delta)
    for c in cfg.integer_columns:
        if c < synth.shape[1]:
            synth[:, c] = np.floor(synth[:, c] + 0.5)

    out = EncodedMatrix(
        np.vstack([X, synth]),
        np.concatenate([y, np.full(n_new, minority, dtype=np.int64)]),
        n_original=len(data),
    )
    if return_draw:
        return out, SmoteDraw(base, nbr, delta)
    return out
