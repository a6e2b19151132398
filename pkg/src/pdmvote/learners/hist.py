"""Histogram-binned gradient boosting with leaf-wise (best-first) tree growth."""

from __future__ import annotations

import heapq

import numpy as np
from scipy.special import expit

from ..errors import DegenerateLabels
from .base import Estimator
from .boosting import initial_log_odds, logistic_loss, safeguarded_leaf_steps
from .tree import LEAF, Tree, _TreeBuffer


def bin_edges(col, max_bins=255):
    """Upper bin edges for one feature; ``len(edges) + 1 <= max_bins`` bins.

    With at most ``max_bins`` distinct values every value gets its own bin
    and the edges are midpoints between neighbours.
    """
    col = np.asarray(col, dtype=np.float64)
    u = np.unique(col)
    if u.size <= max_bins:
        edges = (u[:-1] + u[1:]) / 2.0
        return np.where(edges >= u[1:], u[:-1], edges)
    q = np.linspace(0.0, 100.0, max_bins + 1)[1:-1]
    edges = np.unique(np.percentile(col, q, method="midpoint"))
    return edges[edges < u[-1]]


def apply_bins(X, edges_list):
    X = np.asarray(X, dtype=np.float64)
    out = np.empty(X.shape, dtype=np.int64)
    for f, edges in enumerate(edges_list):
        # number of edges strictly below x; bin(x) <= b  <=>  x <= edges[b]
        out[:, f] = np.searchsorted(edges, X[:, f], side="left")
    return out


def hist_split_gain(GL, HL, GR, HR, l2):
    G, H = GL + GR, HL + HR
    return GL * GL / (HL + l2) + GR * GR / (HR + l2) - G * G / (H + l2)


def find_hist_split(B, g, h, rows, n_bins, min_samples_leaf=20, min_hessian=1e-3, l2=0.0):
    """Best (gain, feature, bin) split of ``rows`` from gradient histograms, or ``None``.

    The left child takes bins ``<= bin``. Ties go to the lower feature, then
    the lower bin.
    """
    best = None
    gr, hr = g[rows], h[rows]
    G, H = gr.sum(), hr.sum()
    for f, nb in enumerate(n_bins):
        if nb < 2:
            continue
        b = B[rows, f]
        hg = np.bincount(b, weights=gr, minlength=nb)
        hh = np.bincount(b, weights=hr, minlength=nb)
        hc = np.bincount(b, minlength=nb)
        GL = np.cumsum(hg)[:-1]
        HL = np.cumsum(hh)[:-1]
        CL = np.cumsum(hc)[:-1]
        GR, HR, CR = G - GL, H - HL, rows.shape[0] - CL
        valid = (CL >= min_samples_leaf) & (CR >= min_samples_leaf) & (HL >= min_hessian) & (HR >= min_hessian)
        if not valid.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = np.where(valid, hist_split_gain(GL, HL, GR, HR, l2), -np.inf)
        i = int(np.argmax(gain))
        if gain[i] > 0 and (best is None or gain[i] > best[0]):
            best = (float(gain[i]), f, i)
    return best


class HistGradientBoosting(Estimator):
    learner_id = "hist_gb"

    def fit(self, X, y, seed=0, n_jobs=1):
        p = self.params
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if y.min() == y.max():
            raise DegenerateLabels("gradient boosting needs both classes")
        self.edges_ = [bin_edges(X[:, f], p["max_bins"]) for f in range(X.shape[1])]
        n_bins = [e.shape[0] + 1 for e in self.edges_]
        B = apply_bins(X, self.edges_)
        self.init_ = initial_log_odds(y)
        raw = np.full(y.shape[0], self.init_)
        self.trees_ = []
        self.train_loss_ = [logistic_loss(y, raw)]
        for _ in range(p["max_iter"]):
            prob = expit(raw)
            g = prob - y
            h = prob * (1.0 - prob)
            tree, leaf_of = self._grow(B, g, h, n_bins)
            n_nodes = tree.node_count
            G = np.bincount(leaf_of, weights=g, minlength=n_nodes)
            H = np.bincount(leaf_of, weights=h, minlength=n_nodes)
            denom = H + p["l2_regularization"]
            newton = np.where(denom > 1e-150, -G / np.where(denom > 1e-150, denom, 1.0), 0.0)
            steps = safeguarded_leaf_steps(y, raw, leaf_of, p["learning_rate"] * newton)
            is_leaf = tree.feature == LEAF
            tree.value[is_leaf] = steps[is_leaf]
            raw = raw + tree.value[leaf_of]
            self.trees_.append(tree)
            self.train_loss_.append(logistic_loss(y, raw))
        return self

    def _grow(self, B, g, h, n_bins):
        p = self.params
        kw = dict(
            min_samples_leaf=p["min_samples_leaf"],
            min_hessian=p["min_hessian"],
            l2=p["l2_regularization"],
        )
        buf = _TreeBuffer()
        n = B.shape[0]
        root = buf.add(0.0, n)
        rows_of = {root: np.arange(n)}
        depth_of = {root: 0}
        heap = []

        def consider(node):
            if p["max_depth"] is not None and depth_of[node] >= p["max_depth"]:
                return
            res = find_hist_split(B, g, h, rows_of[node], n_bins, **kw)
            if res is not None:
                heapq.heappush(heap, (-res[0], node, res[1], res[2]))

        consider(root)
        n_leaves = 1
        while heap and n_leaves < p["max_leaf_nodes"]:
            _, node, f, b = heapq.heappop(heap)
            rows = rows_of.pop(node)
            mask = B[rows, f] <= b
            buf.feature[node] = f
            buf.threshold[node] = float(self.edges_[f][b])
            for side, sel in (("left", rows[mask]), ("right", rows[~mask])):
                child = buf.add(0.0, sel.shape[0])
                getattr(buf, side)[node] = child
                rows_of[child] = sel
                depth_of[child] = depth_of[node] + 1
                consider(child)
            n_leaves += 1
        leaf_of = np.empty(n, dtype=np.int64)
        for node, rows in rows_of.items():
            leaf_of[rows] = node
        return buf.finish(), leaf_of

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
            "edges": list(self.edges_),
            "trees": [t.get_state() for t in self.trees_],
            "train_loss": list(self.train_loss_),
        }

    def set_state(self, s):
        self.init_ = float(s["init"])
        self.edges_ = [np.asarray(e, dtype=np.float64) for e in s["edges"]]
        self.trees_ = [Tree.from_state(t) for t in s["trees"]]
        self.train_loss_ = list(s.get("train_loss", []))
        return self
