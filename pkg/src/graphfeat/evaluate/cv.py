"""Stratified folds, cross-validation and the exhaustive feature-subset search."""
from __future__ import annotations

import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

from ..features import FeatureMatrix, standardize_fit
from ..learn import ForestConfig, KnnConfig, SvmConfig, make_classifier

logger = logging.getLogger(__name__)

CLASSIFIER_IDS = {KnnConfig: "knn", SvmConfig: "svm", ForestConfig: "rf"}


@dataclass(frozen=True)
class FoldAssignment:
    fold_of_row: np.ndarray
    K: int
    seed: int

    def split(self, fold: int):
        test = self.fold_of_row == fold
        return np.flatnonzero(~test), np.flatnonzero(test)


@dataclass(frozen=True)
class CVResult:
    fold_accuracies: np.ndarray
    classifier: str
    mask: tuple[int, ...]
    dataset: str = ""
    seed: int = 0

    @property
    def mean_accuracy(self) -> float:
        """Mean of the fold accuracies, as a percentage."""
        return float(self.fold_accuracies.mean() * 100.0)

    @property
    def mask_bits(self) -> int:
        return sum(1 << c for c in self.mask)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "classifier": self.classifier,
            "seed": self.seed,
            "mask": list(self.mask),
            "fold_accuracies": self.fold_accuracies.tolist(),
            "mean_accuracy": self.mean_accuracy,
        }


def stratified_folds(labels: Sequence[int], K: int = 5, seed: int = 0) -> FoldAssignment:
    """Shuffle each class with one seeded generator, then deal rows round-robin.

    The dealing position carries over from one class to the next so overall
    fold sizes also differ by at most one.
    """
    labels = np.asarray(labels)
    if K < 2 or K > labels.size:
        raise ValueError(f"need 2 <= K <= {labels.size}, got K={K}")
    rng = np.random.default_rng(seed)
    fold = np.empty(labels.size, dtype=np.int64)
    pos = 0
    for c in np.unique(labels):
        rows = rng.permutation(np.flatnonzero(labels == c))
        if rows.size < K:
            warnings.warn(f"class {c} has {rows.size} rows, fewer than K={K} folds",
                          RuntimeWarning, stacklevel=2)
        fold[rows] = (pos + np.arange(rows.size)) % K
        pos = (pos + rows.size) % K
    return FoldAssignment(fold, K, seed)


def fold_seed(seed: int, fold: int) -> int:
    return int(np.random.SeedSequence([seed, fold]).generate_state(1)[0])


def uses_scaling(config) -> bool:
    # trees only compare order statistics, so the forest always sees raw features
    return not isinstance(config, ForestConfig)


class FoldError(RuntimeError):
    def __init__(self, fold, cause):
        self.fold = fold
        super().__init__(f"fold {fold}: {cause}")


def cross_validate(fm: FeatureMatrix, config, folds: FoldAssignment, scale: bool = True,
                   mask: Sequence[int] | None = None) -> CVResult:
    """Train on K-1 folds, score the held-out fold, for every fold.

    ``scale`` z-scores k-NN and SVM inputs with statistics of the training
    rows only. Forest configs get a per-fold seed derived from their own.
    """
    if folds.fold_of_row.size != len(fm):
        raise ValueError("fold assignment does not cover the feature matrix")
    mask = tuple(range(fm.X.shape[1])) if mask is None else tuple(mask)
    X = fm.X[:, list(mask)]
    y = fm.labels
    accs = np.zeros(folds.K)
    for k in range(folds.K):
        train, test = folds.split(k)
        Xtr, Xte = X[train], X[test]
        if scale and uses_scaling(config):
            s = standardize_fit(Xtr)
            Xtr, Xte = s.apply(Xtr), s.apply(Xte)
        cfg = replace(config, seed=fold_seed(config.seed, k)) if isinstance(config, ForestConfig) else config
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                pred = make_classifier(cfg).fit(Xtr, y[train]).predict(Xte)
        except Exception as exc:
            raise FoldError(k, exc) from exc
        accs[k] = float((pred == y[test]).mean()) if test.size else 0.0
    return CVResult(accs, CLASSIFIER_IDS[type(config)], mask, fm.name, folds.seed)


@dataclass(frozen=True)
class SubsetSearchResult:
    k: int
    best: CVResult
    evaluated: list[CVResult] = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.evaluated)


def _cv_masks(args):
    fm, config, folds, masks = args
    return [cross_validate(fm, config, folds, mask=m) for m in masks]


def subset_search(fm: FeatureMatrix, config: ForestConfig, folds: FoldAssignment,
                  k_range: Iterable[int] = range(1, 10), jobs: int = 1) -> dict[int, SubsetSearchResult]:
    """Cross-validate every size-k column subset and keep the most accurate.

    Masks are enumerated in lexicographic order and the first maximum wins,
    so ties go to the lexicographically smallest mask. All masks share the
    same folds and forest seeds.
    """
    if not isinstance(config, ForestConfig):
        raise TypeError("subset search uses the random forest")
    d = fm.X.shape[1]
    out = {}
    for k in k_range:
        if not 1 <= k <= d:
            raise ValueError(f"subset size {k} outside 1..{d}")
        masks = list(combinations(range(d), k))
        if jobs > 1 and len(masks) > 1:
            size = -(-len(masks) // jobs)
            chunks = [(fm, config, folds, masks[i:i + size]) for i in range(0, len(masks), size)]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = [r for part in pool.map(_cv_masks, chunks) for r in part]
        else:
            results = _cv_masks((fm, config, folds, masks))
        assert len(results) == comb(d, k)
        best = results[0]
        for r in results[1:]:
            if r.mean_accuracy > best.mean_accuracy:
                best = r
        logger.info("k=%d: %d masks evaluated, best %s at %.2f%%", k, len(results),
                    best.mask, best.mean_accuracy)
        out[k] = SubsetSearchResult(k, best, results)
    return out
