"""Non-tree baselines: KNN, AdaBoost stumps, LDA, QDA, logistic regression, Gaussian NB, dummy."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.special import expit

from ..errors import DegenerateLabels, NonConvergence, SingularCovariance
from .base import Estimator


def _class_split(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    parts = [X[y == 0], X[y == 1]]
    if parts[0].shape[0] == 0 or parts[1].shape[0] == 0:
        raise DegenerateLabels(f"{X.shape[0]} rows but only one class present")
    return X, y, parts


class KNeighbors(Estimator):
    """Brute-force Minkowski k-NN; score is the fraction of positive neighbours.

    ``leaf_size`` is accepted for interface parity and has no effect on results.
    """

    learner_id = "knn"

    def fit(self, X, y, seed=0, n_jobs=1):
        self.X_ = np.asarray(X, dtype=np.float64).copy()
        self.y_ = np.asarray(y, dtype=np.int64).copy()
        if self.params["n_neighbors"] > self.X_.shape[0]:
            raise ValueError("n_neighbors exceeds the number of training rows")
        return self

    def _distances(self, Q):
        p = self.params["p"]
        d = np.zeros((Q.shape[0], self.X_.shape[0]))
        for f in range(Q.shape[1]):
            diff = np.abs(Q[:, f, None] - self.X_[None, :, f])
            d += diff * diff if p == 2 else diff**p
        return d

    def kneighbors(self, X, chunk=128):
        """Neighbour index sets; equal distances go to the lower training index."""
        Q = np.asarray(X, dtype=np.float64)
        k = self.params["n_neighbors"]
        out = np.empty((Q.shape[0], k), dtype=np.int64)
        for start in range(0, Q.shape[0], chunk):
            d = self._distances(Q[start : start + chunk])
            kth = np.partition(d, k - 1, axis=1)[:, k - 1 : k]
            for i, row in enumerate(d):
                inner = np.flatnonzero(row < kth[i])
                tied = np.flatnonzero(row == kth[i])
                out[start + i] = np.concatenate([inner, tied[: k - inner.size]])
        return out

    def predict_score(self, X):
        return self.y_[self.kneighbors(X)].mean(axis=1)

    def get_state(self):
        return {"X": self.X_, "y": self.y_}

    def set_state(self, s):
        self.X_ = np.asarray(s["X"], dtype=np.float64)
        self.y_ = np.asarray(s["y"], dtype=np.int64)
        return self


def _best_stump(xs_sorted, orders, valid, w, yb):
    """Minimum weighted-error stump over all features.

    Returns ``(error, feature, threshold, left_label)``.
    """
    best = None
    W = w.sum()
    wpos = w * yb
    wneg = w - wpos
    Wneg = wneg.sum()
    for f, order in enumerate(orders):
        if not valid[f].any():
            continue
        # left predicted 0, right predicted 1: positives left and negatives right are wrong
        err_left0 = np.cumsum(wpos[order])[:-1] + (Wneg - np.cumsum(wneg[order])[:-1])
        err_left1 = W - err_left0
        for left_label, err in ((0, err_left0), (1, err_left1)):
            e = np.where(valid[f], err, np.inf)
            i = int(np.argmin(e))
            if best is None or e[i] < best[0]:
                xs = xs_sorted[f]
                thr = (xs[i] + xs[i + 1]) / 2.0
                if thr >= xs[i + 1]:
                    thr = xs[i]
                best = (float(e[i]), f, float(thr), left_label)
    return best


class AdaBoost(Estimator):
    """Discrete AdaBoost over decision stumps with a shrunken stage weight.

    Score is ``(1 + sum(alpha * h) / sum(alpha)) / 2`` with ``h`` in {-1, +1}.
    """

    learner_id = "adaboost"

    def fit(self, X, y, seed=0, n_jobs=1):
        X, y, _ = _class_split(X, y)
        n, d = X.shape
        orders = [np.argsort(X[:, f], kind="stable") for f in range(d)]
        xs_sorted = [X[o, f] for f, o in enumerate(orders)]
        valid = [xs[1:] != xs[:-1] for xs in xs_sorted]
        w = np.full(n, 1.0 / n)
        lr = self.params["learning_rate"]
        self.stumps_ = []
        for _ in range(self.params["n_estimators"]):
            stump = _best_stump(xs_sorted, orders, valid, w, y)
            if stump is None:
                break
            err, f, thr, left_label = stump
            err /= w.sum()
            pred = np.where(X[:, f] <= thr, left_label, 1 - left_label)
            if err <= 0.0:
                self.stumps_.append((f, thr, left_label, 1.0))
                break
            if err >= 0.5:
                if not self.stumps_:
                    self.stumps_.append((f, thr, left_label, 1.0))
                break
            alpha = lr * np.log((1.0 - err) / err)
            self.stumps_.append((f, thr, left_label, float(alpha)))
            w = w * np.exp(alpha * (pred != y))
            w /= w.sum()
        return self

    def predict_score(self, X):
        X = np.asarray(X, dtype=np.float64)
        total = np.zeros(X.shape[0])
        alphas = 0.0
        for f, thr, left_label, alpha in self.stumps_:
            label = np.where(X[:, f] <= thr, left_label, 1 - left_label)
            total += alpha * (2 * label - 1)
            alphas += alpha
        return 0.5 * (1.0 + total / alphas)

    def get_state(self):
        return {"stumps": [list(s) for s in self.stumps_]}

    def set_state(self, s):
        self.stumps_ = [(int(f), float(t), int(l), float(a)) for f, t, l, a in s["stumps"]]
        return self


def ledoit_wolf_shrinkage(Xc):
    """Ledoit-Wolf shrinkage intensity for centred data ``Xc`` (rows = samples)."""
    n, p = Xc.shape
    X2 = Xc**2
    trace = X2.sum() / n
    mu = trace / p
    beta_ = np.sum(X2.T @ X2)
    delta_ = np.sum((Xc.T @ Xc) ** 2) / n**2
    beta = (beta_ / n - delta_) / (p * n)
    delta = (delta_ - 2.0 * mu * trace + p * mu**2) / p
    beta = min(beta, delta)
    return 0.0 if beta == 0 else float(beta / delta)


def shrunk_covariance(Xc):
    """Biased covariance shrunk toward ``mu * I`` with the Ledoit-Wolf intensity.

    Features are standardised first so the intensity is scale-free.
    """
    n, p = Xc.shape
    sc = Xc.std(axis=0)
    sc[sc == 0] = 1.0
    Z = Xc / sc
    s = ledoit_wolf_shrinkage(Z)
    emp = Z.T @ Z / n
    mu = np.trace(emp) / p
    shrunk = (1.0 - s) * emp + s * mu * np.eye(p)
    return sc[:, None] * shrunk * sc[None, :], s


def _log_priors(y):
    counts = np.bincount(y, minlength=2).astype(np.float64)
    return np.log(counts / counts.sum())


class LinearDiscriminant(Estimator):
    learner_id = "lda"

    def fit(self, X, y, seed=0, n_jobs=1):
        X, y, parts = _class_split(X, y)
        for part in parts:
            if part.shape[0] < 2:
                raise SingularCovariance("LDA needs at least two rows per class")
        priors = np.exp(_log_priors(y))
        means = [part.mean(axis=0) for part in parts]
        if self.params["shrinkage"] == "auto":
            covs = [shrunk_covariance(part - m)[0] for part, m in zip(parts, means)]
        else:
            s = float(self.params["shrinkage"] or 0.0)
            covs = []
            for part, m in zip(parts, means):
                c = np.cov(part - m, rowvar=False, bias=True)
                covs.append((1 - s) * c + s * np.trace(c) / c.shape[0] * np.eye(c.shape[0]))
        sigma = priors[0] * covs[0] + priors[1] * covs[1]
        try:
            np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError:
            sigma = sigma + 1e-10 * max(np.trace(sigma), 1.0) * np.eye(sigma.shape[0])
            try:
                np.linalg.cholesky(sigma)
            except np.linalg.LinAlgError:
                raise SingularCovariance("pooled covariance is not positive definite") from None
        coef = np.linalg.solve(sigma, np.stack(means, axis=1))
        self.coef_ = coef[:, 1] - coef[:, 0]
        lp = np.log(priors)
        self.intercept_ = float(
            -0.5 * (means[1] @ coef[:, 1] - means[0] @ coef[:, 0]) + lp[1] - lp[0]
        )
        return self

    def predict_score(self, X):
        return expit(np.asarray(X, dtype=np.float64) @ self.coef_ + self.intercept_)

    def get_state(self):
        return {"coef": self.coef_, "intercept": self.intercept_}

    def set_state(self, s):
        self.coef_ = np.asarray(s["coef"], dtype=np.float64)
        self.intercept_ = float(s["intercept"])
        return self


class QuadraticDiscriminant(Estimator):
    """Per-class Gaussian with full covariance.

    Eigenvalues below ``tol * largest`` are raised to that floor.
    """

    learner_id = "qda"

    def fit(self, X, y, seed=0, n_jobs=1):
        X, y, parts = _class_split(X, y)
        tol, reg = self.params["tol"], self.params["reg_param"]
        self.log_priors_ = _log_priors(y)
        self.means_, self.rotations_, self.scalings_ = [], [], []
        for k, part in enumerate(parts):
            if part.shape[0] < 2:
                raise SingularCovariance(f"class {k} has fewer than two rows")
            m = part.mean(axis=0)
            cov = np.cov(part - m, rowvar=False, ddof=1)
            evals, evecs = np.linalg.eigh(np.atleast_2d(cov))
            evals = (1.0 - reg) * evals + reg
            top = evals.max()
            if not top > 0:
                raise SingularCovariance(f"class {k} covariance is zero")
            evals = np.maximum(evals, tol * top)
            self.means_.append(m)
            self.rotations_.append(evecs)
            self.scalings_.append(evals)
        return self

    def _log_likelihood(self, X):
        out = []
        for m, R, s, lp in zip(self.means_, self.rotations_, self.scalings_, self.log_priors_):
            Z = ((X - m) @ R) / np.sqrt(s)
            out.append(-0.5 * (np.sum(np.log(s)) + np.sum(Z * Z, axis=1)) + lp)
        return out

    def predict_score(self, X):
        l0, l1 = self._log_likelihood(np.asarray(X, dtype=np.float64))
        return expit(l1 - l0)

    def get_state(self):
        return {
            "log_priors": self.log_priors_,
            "means": self.means_,
            "rotations": self.rotations_,
            "scalings": self.scalings_,
        }

    def set_state(self, s):
        self.log_priors_ = np.asarray(s["log_priors"], dtype=np.float64)
        self.means_ = [np.asarray(a, dtype=np.float64) for a in s["means"]]
        self.rotations_ = [np.asarray(a, dtype=np.float64) for a in s["rotations"]]
        self.scalings_ = [np.asarray(a, dtype=np.float64) for a in s["scalings"]]
        return self


class LogisticRegression(Estimator):
    """L2-penalised logistic regression fitted by damped Newton steps.

    Minimises ``0.5 * |w|^2 + C * sum(logloss)``; the intercept is not
    penalised. Converged when the largest gradient component drops below
    ``tol``.
    """

    learner_id = "logreg"

    def fit(self, X, y, seed=0, n_jobs=1):
        X, y, _ = _class_split(X, y)
        C, tol, max_iter = self.params["C"], self.params["tol"], self.params["max_iter"]
        n, d = X.shape
        Z = np.hstack([X, np.ones((n, 1))])
        pen = np.ones(d + 1)
        pen[-1] = 0.0
        if self.params["penalty"] == "none":
            pen[:] = 0.0
        yf = y.astype(np.float64)

        def objective(w):
            z = Z @ w
            return C * np.sum(np.logaddexp(0.0, z) - yf * z) + 0.5 * np.sum(pen * w * w)

        w = np.zeros(d + 1)
        f = objective(w)
        self.converged_ = False
        self.n_iter_ = 0
        for it in range(1, max_iter + 1):
            p = expit(Z @ w)
            grad = C * Z.T @ (p - yf) + pen * w
            if np.max(np.abs(grad)) < tol:
                self.converged_ = True
                self.n_iter_ = it - 1
                break
            H = C * (Z.T * (p * (1.0 - p))) @ Z + np.diag(pen) + 1e-12 * np.eye(d + 1)
            step = np.linalg.solve(H, grad)
            t = 1.0
            while t > 1e-10:
                w_new = w - t * step
                f_new = objective(w_new)
                if f_new <= f:
                    break
                t *= 0.5
            w, f = w_new, f_new
            self.n_iter_ = it
        else:
            p = expit(Z @ w)
            grad = C * Z.T @ (p - yf) + pen * w
            self.converged_ = bool(np.max(np.abs(grad)) < tol)
        if not self.converged_:
            warnings.warn(f"logistic regression did not reach tol={tol} in {max_iter} iterations", NonConvergence, stacklevel=2)
        self.coef_ = w[:-1]
        self.intercept_ = float(w[-1])
        return self

    def predict_score(self, X):
        return expit(np.asarray(X, dtype=np.float64) @ self.coef_ + self.intercept_)

    def get_state(self):
        return {"coef": self.coef_, "intercept": self.intercept_, "converged": self.converged_}

    def set_state(self, s):
        self.coef_ = np.asarray(s["coef"], dtype=np.float64)
        self.intercept_ = float(s["intercept"])
        self.converged_ = bool(s.get("converged", True))
        return self


class GaussianNB(Estimator):
    learner_id = "gnb"

    def fit(self, X, y, seed=0, n_jobs=1):
        X, y, parts = _class_split(X, y)
        eps = self.params["var_smoothing"] * np.var(X, axis=0).max()
        self.log_priors_ = _log_priors(y)
        self.means_ = np.stack([p.mean(axis=0) for p in parts])
        self.vars_ = np.stack([p.var(axis=0) for p in parts]) + eps
        if np.any(self.vars_ <= 0):
            # all features constant; fall back to unit variance
            self.vars_ = np.where(self.vars_ > 0, self.vars_, 1.0)
        return self

    def predict_score(self, X):
        X = np.asarray(X, dtype=np.float64)
        ll = []
        for k in range(2):
            v = self.vars_[k]
            ll.append(-0.5 * np.sum(np.log(2 * np.pi * v)) - 0.5 * np.sum((X - self.means_[k]) ** 2 / v, axis=1) + self.log_priors_[k])
        return expit(ll[1] - ll[0])

    def get_state(self):
        return {"log_priors": self.log_priors_, "means": self.means_, "vars": self.vars_}

    def set_state(self, s):
        self.log_priors_ = np.asarray(s["log_priors"], dtype=np.float64)
        self.means_ = np.asarray(s["means"], dtype=np.float64)
        self.vars_ = np.asarray(s["vars"], dtype=np.float64)
        return self


class Dummy(Estimator):
    """Constant predictor of the most frequent training label (ties -> 0).

    The score is that label as 0.0/1.0, so it never ranks one row above another.
    """

    learner_id = "dummy"

    def fit(self, X, y, seed=0, n_jobs=1):
        counts = np.bincount(np.asarray(y, dtype=np.int64), minlength=2)
        self.majority_ = int(np.argmax(counts))
        self.base_rate_ = float(counts[1] / counts.sum())
        return self

    def predict_score(self, X):
        return np.full(np.asarray(X).shape[0], float(self.majority_))

    def get_state(self):
        return {"majority": self.majority_, "base_rate": self.base_rate_}

    def set_state(self, s):
        self.majority_ = int(s["majority"])
        self.base_rate_ = float(s["base_rate"])
        return self
