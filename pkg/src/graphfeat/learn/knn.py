from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KnnConfig:
    k: int = 5

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")


def _as_arrays(train_X, train_y=None):
    if hasattr(train_X, "X"):
        return np.asarray(train_X.X, dtype=np.float64), np.asarray(train_X.labels)
    return np.asarray(train_X, dtype=np.float64), np.asarray(train_y)


def knn_predict(train_X, query, cfg: KnnConfig = KnnConfig(), train_y=None) -> int:
    """Majority vote among the ``k`` nearest training rows (Euclidean).

    Distance ties go to the lower training-row index. Vote ties go to the
    class whose best-ranked member comes first in that ordering, which
    settles equal distances by row index as well.
    """
    X, y = _as_arrays(train_X, train_y)
    if cfg.k > X.shape[0]:
        raise ValueError(f"k={cfg.k} exceeds the {X.shape[0]} training rows")
    q = np.asarray(query, dtype=np.float64)
    dist = np.sqrt(((X - q) ** 2).sum(axis=1))
    ranked = np.argsort(dist, kind="stable")[:cfg.k]
    votes: dict[int, list[int]] = {}
    for rank, row in enumerate(ranked.tolist()):
        entry = votes.setdefault(int(y[row]), [0, rank])
        entry[0] += 1
    # most votes, then earliest-ranked member, then lower class id
    return min(votes, key=lambda c: (-votes[c][0], votes[c][1], c))


class KNNClassifier:
    """Lazy learner: ``fit`` only stores the training matrix."""

    def __init__(self, k=5):
        self.config = KnnConfig(k)

    def fit(self, X, y):
        self.X_ = np.asarray(X, dtype=np.float64)
        self.y_ = np.asarray(y)
        if self.config.k > self.X_.shape[0]:
            raise ValueError(f"k={self.config.k} exceeds the {self.X_.shape[0]} training rows")
        return self

    def predict(self, X):
        return np.array([knn_predict(self.X_, q, self.config, self.y_) for q in np.atleast_2d(X)],
                        dtype=np.int64)
