"""Soft-margin linear SVM trained by SMO on the dual, one-vs-one for multiclass."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from numba import njit

TAU = 1e-12


@dataclass(frozen=True)
class SvmConfig:
    C: float = 10.0
    tol: float = 1e-3
    max_iter: int = 100_000

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")


@dataclass(frozen=True)
class BinarySvm:
    """Decision function ``w . x + b``; positive means ``positive_class``."""

    positive_class: int
    negative_class: int
    w: np.ndarray
    b: float
    alpha: np.ndarray
    dual_objective: float
    iterations: int
    converged: bool

    def decision(self, X):
        return np.asarray(X, dtype=np.float64) @ self.w + self.b


@dataclass(frozen=True)
class SvmModel:
    classes: np.ndarray
    pairs: list[BinarySvm]
    C: float

    @property
    def converged(self) -> bool:
        return all(p.converged for p in self.pairs)

    def predict(self, X):
        return svm_predict(self, X)


@njit(cache=True)
def _smo(K, y, C, tol, max_iter):
    """Maximal-violating-pair SMO; returns (alpha, gradient, iterations, converged)."""
    n = y.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    for it in range(max_iter):
        i = -1
        j = -1
        g_max = -np.inf
        g_min = np.inf
        for t in range(n):
            yg = -y[t] * grad[t]
            up = (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0)
            low = (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C)
            if up and yg > g_max:
                g_max = yg
                i = t
            if low and yg < g_min:
                g_min = yg
                j = t
        if i < 0 or j < 0 or g_max - g_min < tol:
            return alpha, grad, it, True
        qij = y[i] * y[j] * K[i, j]
        ai_old = alpha[i]
        aj_old = alpha[j]
        if y[i] != y[j]:
            quad = K[i, i] + K[j, j] + 2.0 * qij
            if quad <= 0.0:
                quad = TAU
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0.0:
                if alpha[j] < 0.0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0.0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0.0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            quad = K[i, i] + K[j, j] - 2.0 * qij
            if quad <= 0.0:
                quad = TAU
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            else:
                if alpha[j] < 0.0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[i] < 0.0:
                    alpha[i] = 0.0
                    alpha[j] = total
        di = alpha[i] - ai_old
        dj = alpha[j] - aj_old
        for t in range(n):
            grad[t] += y[t] * (y[i] * K[t, i] * di + y[j] * K[t, j] * dj)
    return alpha, grad, max_iter, False


def _bias(alpha, grad, y, C):
    """Mean residual ``y - w.x`` over free support vectors, else the midpoint
    of the feasible interval."""
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(-yg[free].mean())
    upper = ((y < 0) & (alpha >= C)) | ((y > 0) & (alpha <= 0))
    lower = ((y > 0) & (alpha >= C)) | ((y < 0) & (alpha <= 0))
    ub = yg[upper].min() if upper.any() else np.inf
    lb = yg[lower].max() if lower.any() else -np.inf
    if np.isinf(ub) or np.isinf(lb):
        mid = ub if np.isfinite(ub) else lb
        return float(-mid) if np.isfinite(mid) else 0.0
    return float(-(ub + lb) / 2)


def train_binary(X, y, cfg: SvmConfig = SvmConfig()):
    """Train on labels ``y`` in {+1, -1}; returns ``(w, b, alpha, dual, iters, ok)``."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    K = X @ X.T
    alpha, grad, it, ok = _smo(K, y, float(cfg.C), float(cfg.tol), int(cfg.max_iter))
    w = (alpha * y) @ X
    b = _bias(alpha, grad, y, cfg.C)
    ay = alpha * y
    dual = float(alpha.sum() - 0.5 * ay @ K @ ay)
    return w, b, alpha, dual, int(it), bool(ok)


def svm_train(X, y=None, C: float | SvmConfig = 10.0) -> SvmModel:
    """One binary SVM per class pair. ``X`` may be a FeatureMatrix."""
    if hasattr(X, "labels"):
        X, y = X.X, X.labels
    cfg = C if isinstance(C, SvmConfig) else SvmConfig(C=float(C))
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size < 2:
        raise ValueError("SVM training needs at least two classes")
    pairs = []
    for a, b in combinations(classes.tolist(), 2):
        sel = (y == a) | (y == b)
        yy = np.where(y[sel] == a, 1.0, -1.0)
        w, bias, alpha, dual, it, ok = train_binary(X[sel], yy, cfg)
        if not ok:
            warnings.warn(f"SMO for classes ({a}, {b}) hit the {cfg.max_iter} iteration cap",
                          RuntimeWarning, stacklevel=2)
        pairs.append(BinarySvm(a, b, w, bias, alpha, dual, it, ok))
    return SvmModel(classes, pairs, cfg.C)


def svm_predict(model: SvmModel, X):
    """One-vs-one vote; ties go to the larger summed |decision| of won pairs,
    then the lower class id. Returns a scalar for a single vector."""
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    index = {c: k for k, c in enumerate(model.classes.tolist())}
    votes = np.zeros((X.shape[0], len(index)))
    margin = np.zeros_like(votes)
    for p in model.pairs:
        f = p.decision(X)
        win = np.where(f > 0, index[p.positive_class], index[p.negative_class])
        rows = np.arange(X.shape[0])
        votes[rows, win] += 1
        margin[rows, win] += np.abs(f)
    out = np.empty(X.shape[0], dtype=np.int64)
    for r in range(X.shape[0]):
        # lexsort keys: last is primary; index order (lower class first) breaks remaining ties
        order = np.lexsort((np.arange(len(index)), -margin[r], -votes[r]))
        out[r] = model.classes[order[0]]
    return int(out[0]) if single else out


class LinearSVM:
    def __init__(self, C=10.0, tol=1e-3, max_iter=100_000):
        self.config = SvmConfig(C, tol, max_iter)

    def fit(self, X, y):
        self.model_ = svm_train(X, y, self.config)
        return self

    def predict(self, X):
        return svm_predict(self.model_, np.atleast_2d(X))
