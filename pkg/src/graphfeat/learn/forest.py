"""Random forest of entropy-split decision trees grown on bootstrap samples."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

LEAF = -1


@dataclass(frozen=True)
class ForestConfig:
    trees: int = 200
    max_depth: int = 5
    seed: int = 0
    max_features: int | None = None  # None -> ceil(sqrt(d))

    def __post_init__(self):
        if self.trees < 1 or self.max_depth < 0:
            raise ValueError("need trees >= 1 and max_depth >= 0")


@dataclass(frozen=True)
class Tree:
    """Flat node arrays; node 0 is the root.

    ``feature[i] == -1`` marks a leaf. ``counts[i]`` is the bootstrap class
    histogram reaching node ``i`` and ``gain[i]`` the sample-fraction weighted
    entropy reduction of its split (0 at leaves).
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray
    gain: np.ndarray

    @property
    def node_count(self) -> int:
        return self.feature.size

    @property
    def depth(self) -> int:
        def walk(i):
            if self.feature[i] == LEAF:
                return 0
            return 1 + max(walk(self.left[i]), walk(self.right[i]))
        return walk(0)

    def apply(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            f = self.feature[node[active]]
            go_left = X[active, f] <= self.threshold[node[active]]
            node[active] = np.where(go_left, self.left[node[active]], self.right[node[active]])
            active = self.feature[node] != LEAF
        return node

    def predict(self, X) -> np.ndarray:
        return self.counts[self.apply(X)].argmax(axis=1)


@dataclass(frozen=True)
class Forest:
    trees: list[Tree]
    n_classes: int
    n_features: int
    config: ForestConfig

    def predict(self, X):
        return rf_predict(self, X)


@njit(cache=True)
def _entropy(counts, total):
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


@njit(cache=True)
def _grow(X, y, sample, n_classes, draws, max_depth):
    n = sample.shape[0]
    cap = 2 * draws.shape[0] + 1
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    counts = np.zeros((cap, n_classes))
    gain = np.zeros(cap)
    depth = np.zeros(cap, np.int64)
    lo = np.zeros(cap, np.int64)
    hi = np.zeros(cap, np.int64)
    idx = sample.copy()
    lo[0] = 0
    hi[0] = n
    n_nodes = 1
    n_internal = 0
    stack = [0]
    left_c = np.zeros(n_classes)
    right_c = np.zeros(n_classes)
    while len(stack) > 0:
        node = stack.pop()
        s = lo[node]
        e = hi[node]
        size = e - s
        for k in range(s, e):
            counts[node, y[idx[k]]] += 1.0
        h = _entropy(counts[node], size)
        if depth[node] >= max_depth or h <= 0.0 or n_internal >= draws.shape[0]:
            continue
        best_gain = 1e-12
        best_f = -1
        best_thr = 0.0
        for f in draws[n_internal]:
            vals = np.empty(size)
            for k in range(size):
                vals[k] = X[idx[s + k], f]
            order = np.argsort(vals, kind="mergesort")
            left_c[:] = 0.0
            right_c[:] = counts[node]
            for r in range(size - 1):
                c = y[idx[s + order[r]]]
                left_c[c] += 1.0
                right_c[c] -= 1.0
                a = vals[order[r]]
                b = vals[order[r + 1]]
                if a == b:
                    continue
                nl = r + 1
                nr = size - nl
                child = (nl * _entropy(left_c, nl) + nr * _entropy(right_c, nr)) / size
                g = h - child
                if g > best_gain:
                    best_gain = g
                    best_f = f
                    mid = 0.5 * (a + b)
                    best_thr = mid if mid < b else a
        n_internal += 1
        if best_f < 0:
            continue
        # partition idx[s:e] so samples going left come first
        i = s
        j = e - 1
        while i <= j:
            if X[idx[i], best_f] <= best_thr:
                i += 1
            else:
                tmp = idx[i]
                idx[i] = idx[j]
                idx[j] = tmp
                j -= 1
        feature[node] = best_f
        threshold[node] = best_thr
        gain[node] = best_gain * size / n
        left[node] = n_nodes
        right[node] = n_nodes + 1
        depth[n_nodes] = depth[node] + 1
        depth[n_nodes + 1] = depth[node] + 1
        lo[n_nodes] = s
        hi[n_nodes] = i
        lo[n_nodes + 1] = i
        hi[n_nodes + 1] = e
        stack.append(n_nodes + 1)
        stack.append(n_nodes)
        n_nodes += 2
    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes], right[:n_nodes],
            counts[:n_nodes], gain[:n_nodes])


def max_features_for(d: int, cfg: ForestConfig) -> int:
    m = cfg.max_features if cfg.max_features is not None else math.ceil(math.sqrt(d))
    return max(1, min(d, m))


def tree_rng(seed: int, t: int) -> np.random.Generator:
    """Per-tree generator; depends only on (seed, t), never on scheduling."""
    return np.random.default_rng([seed, t])


def grow_tree(X, y, n_classes, rng: np.random.Generator, max_depth=5, max_features=None) -> Tree:
    """One tree on a bootstrap sample of ``len(X)`` rows drawn from ``rng``.

    Each split considers ``max_features`` columns sampled without replacement
    and the midpoints between consecutive distinct sorted values.
    """
    n, d = X.shape
    mtry = max_features or math.ceil(math.sqrt(d))
    sample = rng.integers(0, n, size=n)
    # one feature draw per node that attempts a split, in creation order
    n_internal = min(2 * n, 2 ** max_depth - 1) if max_depth < 62 else 2 * n
    draws = np.argsort(rng.random((max(n_internal, 1), d)), axis=1)[:, :mtry].astype(np.int64)
    parts = _grow(X, y, sample, n_classes, draws, max_depth)
    return Tree(*parts)


def rf_train(X, y=None, cfg: ForestConfig = ForestConfig()) -> Forest:
    """Train ``cfg.trees`` trees; deterministic given ``cfg.seed``.

    ``X`` may be a FeatureMatrix (labels taken from it) or an array.
    """
    if hasattr(X, "labels"):
        X, y = X.X, X.labels
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("cannot train on zero rows")
    n_classes = int(y.max()) + 1
    mtry = max_features_for(X.shape[1], cfg)
    trees = [grow_tree(X, y, n_classes, tree_rng(cfg.seed, t), cfg.max_depth, mtry)
             for t in range(cfg.trees)]
    return Forest(trees, n_classes, X.shape[1], cfg)


def rf_predict(f: Forest, X):
    """Majority vote of the trees' leaf classes; ties go to the lower class id."""
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    votes = np.zeros((X.shape[0], f.n_classes), dtype=np.int64)
    rows = np.arange(X.shape[0])
    for t in f.trees:
        np.add.at(votes, (rows, t.predict(X)), 1)
    out = votes.argmax(axis=1)
    return int(out[0]) if single else out


def rf_feature_importance(f: Forest) -> np.ndarray:
    """Mean decrease in entropy per feature.

    Each tree's importances are normalized to sum to 1 and averaged over the
    trees that split at least once; a forest of stumps gives all zeros.
    """
    total = np.zeros(f.n_features)
    used = 0
    for t in f.trees:
        imp = np.zeros(f.n_features)
        split = t.feature != LEAF
        np.add.at(imp, t.feature[split], t.gain[split])
        s = imp.sum()
        if s > 0:
            total += imp / s
            used += 1
    return total / used if used else total


class RandomForest:
    def __init__(self, trees=200, max_depth=5, seed=0, max_features=None):
        self.config = ForestConfig(trees, max_depth, seed, max_features)

    def fit(self, X, y):
        self.forest_ = rf_train(X, y, self.config)
        return self

    def predict(self, X):
        return rf_predict(self.forest_, np.atleast_2d(X))

    @property
    def feature_importances_(self):
        return rf_feature_importance(self.forest_)
