"""CART trees stored as flat arrays.

Classification trees split on Gini gain; regression trees (used inside
gradient boosting) split on squared-error reduction. Rows with
``x[feature] <= threshold`` go left.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyNode

GAIN_EPS = 1e-12
LEAF = -1


def gini_impurity(class_counts) -> float:
    counts = np.asarray(class_counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        raise EmptyNode("gini impurity of an empty node")
    p = counts / total
    return float(1.0 - np.sum(p * p))


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray

    @property
    def node_count(self):
        return self.feature.shape[0]

    @property
    def n_leaves(self):
        return int(np.sum(self.feature == LEAF))

    def depth(self):
        depths = np.zeros(self.node_count, dtype=np.int64)
        for i in range(self.node_count):
            if self.feature[i] != LEAF:
                depths[self.left[i]] = depths[self.right[i]] = depths[i] + 1
        return int(depths.max())

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by every row of ``X``."""
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.arange(X.shape[0])
        while active.size:
            cur = node[active]
            f = self.feature[cur]
            internal = f != LEAF
            active, cur, f = active[internal], cur[internal], f[internal]
            if not active.size:
                break
            go_left = X[active, f] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
        return node

    def predict_value(self, X) -> np.ndarray:
        return self.value[self.apply(X)]

    def get_state(self):
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
            "n_samples": self.n_samples,
        }

    @classmethod
    def from_state(cls, s):
        return cls(
            np.asarray(s["feature"], dtype=np.int64),
            np.asarray(s["threshold"], dtype=np.float64),
            np.asarray(s["left"], dtype=np.int64),
            np.asarray(s["right"], dtype=np.int64),
            np.asarray(s["value"], dtype=np.float64),
            np.asarray(s["n_samples"], dtype=np.int64),
        )


class _TreeBuffer:
    def __init__(self):
        self.feature, self.threshold, self.left, self.right = [], [], [], []
        self.value, self.n = [], []

    def add(self, value, n):
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(value)
        self.n.append(n)
        return len(self.feature) - 1

    def finish(self):
        return Tree(
            np.array(self.feature, dtype=np.int64),
            np.array(self.threshold, dtype=np.float64),
            np.array(self.left, dtype=np.int64),
            np.array(self.right, dtype=np.int64),
            np.array(self.value, dtype=np.float64),
            np.array(self.n, dtype=np.int64),
        )


def _midpoint(a, b):
    t = (a + b) / 2.0
    return a if t >= b else t


# -- split search --------------------------------------------------------------

def _gini_scan(x, y, min_leaf):
    """Best Gini boundary on one feature: ``(gain, threshold)`` or ``None``."""
    m = x.shape[0]
    order = np.argsort(x, kind="stable")
    xs = x[order]
    cum = np.cumsum(y[order])
    total = cum[-1]
    nl = np.arange(1, m, dtype=np.float64)
    nr = m - nl
    pl = cum[:-1].astype(np.float64)
    pr = total - pl
    valid = xs[1:] != xs[:-1]
    if min_leaf > 1:
        valid &= (nl >= min_leaf) & (nr >= min_leaf)
    if not valid.any():
        return None
    child = 2.0 * (pl * (nl - pl) / nl + pr * (nr - pr) / nr) / m
    parent = 2.0 * total * (m - total) / (m * m)
    gain = np.where(valid, parent - child, -np.inf)
    i = int(np.argmax(gain))
    return float(gain[i]), _midpoint(xs[i], xs[i + 1])


def best_split(X, y, feature_subset=None, min_samples_split=2, min_samples_leaf=1):
    """Exact Gini split over midpoints of consecutive distinct values.

    Returns the :class:`Split` with the largest positive gain, preferring the
    lowest feature index and then the lowest threshold on ties, or ``None``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] < max(min_samples_split, 2):
        return None
    features = range(X.shape[1]) if feature_subset is None else sorted(feature_subset)
    best = None
    for f in features:
        res = _gini_scan(X[:, f], y, min_samples_leaf)
        if res is None:
            continue
        gain, thr = res
        if gain > GAIN_EPS and (best is None or gain > best.gain):
            best = Split(int(f), float(thr), gain)
    return best


def _median_split(Xn, features, min_leaf):
    """Fallback for impure nodes where no split gains: lowest usable feature, median boundary."""
    for f in sorted(features):
        u = np.unique(Xn[:, f])
        if u.size < 2:
            continue
        j = u.size // 2
        thr = _midpoint(u[j - 1], u[j])
        n_left = int(np.sum(Xn[:, f] <= thr))
        if n_left >= min_leaf and Xn.shape[0] - n_left >= min_leaf:
            return Split(int(f), float(thr), 0.0)
    return None


def _random_split(Xn, yn, features, min_leaf, rng, lo, hi):
    """Extra-trees split: one uniform threshold per feature, best Gini gain wins.

    ``lo``/``hi`` are the node's per-feature minima and maxima.
    """
    m = Xn.shape[0]
    total = int(yn.sum())
    parent = 2.0 * total * (m - total) / (m * m)
    best = None
    for f in features:
        thr = float(rng.uniform(lo[f], hi[f]))
        if thr >= hi[f]:
            thr = float(lo[f])
        mask = Xn[:, f] <= thr
        nl = int(np.count_nonzero(mask))
        nr = m - nl
        if nl < min_leaf or nr < min_leaf or nl == 0 or nr == 0:
            continue
        pl = int(np.dot(mask, yn))
        pr = total - pl
        child = 2.0 * (pl * (nl - pl) / nl + pr * (nr - pr) / nr) / m
        gain = parent - child
        if best is None or gain > best.gain:
            best = Split(int(f), thr, float(gain))
    return best


def _draw_features(varying, max_features, rng):
    """Features visited in random order until ``max_features`` non-constant ones are found.

    ``varying`` flags the features that are not constant within the node.
    """
    n_features = varying.shape[0]
    if max_features is None or max_features >= n_features:
        return [int(f) for f in np.flatnonzero(varying)]
    feats = []
    for f in rng.permutation(n_features):
        if varying[f]:
            feats.append(int(f))
            if len(feats) == max_features:
                break
    return feats


# -- growth ------------------------------------------------------------------

def build_cart(
    X,
    y,
    *,
    max_depth=None,
    min_samples_split=2,
    min_samples_leaf=1,
    max_features=None,
    splitter="best",
    rng=None,
    zero_gain_fallback=True,
) -> Tree:
    """Grow a binary Gini classification tree; leaf value = positive fraction."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    if n < 1:
        raise EmptyNode("cannot grow a tree on zero rows")
    if splitter not in ("best", "random"):
        raise ValueError(f"unknown splitter {splitter!r}")
    if rng is None:
        rng = np.random.default_rng(0)
    buf = _TreeBuffer()
    # (rows, depth, parent, is_left)
    stack = [(np.arange(n), 0, -1, False)]
    while stack:
        rows, depth, parent, is_left = stack.pop()
        yn = y[rows]
        m = rows.shape[0]
        pos = int(yn.sum())
        node = buf.add(pos / m, m)
        if parent >= 0:
            (buf.left if is_left else buf.right)[parent] = node

        if pos == 0 or pos == m or m < min_samples_split or m < 2 * min_samples_leaf:
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        Xn = X[rows]
        lo, hi = Xn.min(axis=0), Xn.max(axis=0)
        features = _draw_features(lo < hi, max_features, rng)
        if not features:
            continue
        if splitter == "random":
            split = _random_split(Xn, yn, features, min_samples_leaf, rng, lo, hi)
        else:
            split = best_split(Xn, yn, features, min_samples_split, min_samples_leaf)
            if split is None and zero_gain_fallback:
                split = _median_split(Xn, features, min_samples_leaf)
        if split is None:
            continue
        mask = Xn[:, split.feature] <= split.threshold
        buf.feature[node] = split.feature
        buf.threshold[node] = split.threshold
        stack.append((rows[~mask], depth + 1, node, False))
        stack.append((rows[mask], depth + 1, node, True))
    return buf.finish()


def _sse_scan(x, r, min_leaf):
    m = x.shape[0]
    order = np.argsort(x, kind="stable")
    xs = x[order]
    cum = np.cumsum(r[order])
    total = cum[-1]
    nl = np.arange(1, m, dtype=np.float64)
    nr = m - nl
    sl = cum[:-1]
    sr = total - sl
    valid = xs[1:] != xs[:-1]
    if min_leaf > 1:
        valid &= (nl >= min_leaf) & (nr >= min_leaf)
    if not valid.any():
        return None
    gain = sl * sl / nl + sr * sr / nr - total * total / m
    gain = np.where(valid, gain, -np.inf)
    i = int(np.argmax(gain))
    return float(gain[i]), _midpoint(xs[i], xs[i + 1])


def build_regression_tree(X, r, *, max_depth=3, min_samples_split=2, min_samples_leaf=1):
    """Least-squares tree on targets ``r``.

    Returns ``(tree, leaf_of_row)``; leaf values hold the mean target and are
    usually overwritten by the caller.
    """
    X = np.asarray(X, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    n, d = X.shape
    buf = _TreeBuffer()
    leaf_of = np.empty(n, dtype=np.int64)
    stack = [(np.arange(n), 0, -1, False)]
    while stack:
        rows, depth, parent, is_left = stack.pop()
        m = rows.shape[0]
        rn = r[rows]
        node = buf.add(float(rn.mean()), m)
        if parent >= 0:
            (buf.left if is_left else buf.right)[parent] = node
        split = None
        if m >= min_samples_split and m >= 2 * min_samples_leaf and (max_depth is None or depth < max_depth):
            Xn = X[rows]
            for f in range(d):
                res = _sse_scan(Xn[:, f], rn, min_samples_leaf)
                if res is not None and res[0] > GAIN_EPS and (split is None or res[0] > split.gain):
                    split = Split(f, res[1], res[0])
        if split is None:
            leaf_of[rows] = node
            continue
        mask = X[rows, split.feature] <= split.threshold
        buf.feature[node] = split.feature
        buf.threshold[node] = split.threshold
        stack.append((rows[~mask], depth + 1, node, False))
        stack.append((rows[mask], depth + 1, node, True))
    return buf.finish(), leaf_of
