"""Nine-dimensional structural feature vectors and their scaling."""
from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import metrics
from .graph import Dataset, Graph, remap_labels

FEATURE_NAMES = (
    "n", "m", "avg_degree", "diameter", "avg_closeness",
    "avg_betweenness", "avg_clustering", "spectral_radius", "laplacian_trace",
)
# symbols used in figures and tables
FEATURE_SYMBOLS = ("n", "m", "<k>", "diameter", "H", "B", "C", "rho(L)", "Tr(L)")
CSV_HEADER = ("graph_id", "label") + FEATURE_NAMES


class FeatureVector(NamedTuple):
    n: float
    m: float
    avg_degree: float
    diameter: float
    avg_closeness: float
    avg_betweenness: float
    avg_clustering: float
    spectral_radius: float
    laplacian_trace: float


class FeatureExtractionError(RuntimeError):
    def __init__(self, index, cause):
        self.index = index
        super().__init__(f"graph {index}: {cause}")


@dataclass(frozen=True)
class FeatureMatrix:
    """Row-per-graph feature matrix with contiguous class ids."""

    X: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = FEATURE_NAMES
    graph_ids: np.ndarray | None = None
    label_map: dict[int, int] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[0] != len(self.labels):
            raise ValueError("X must be 2-D with one row per label")
        if self.X.shape[1] != len(self.feature_names):
            raise ValueError("column count does not match feature names")
        if self.graph_ids is None:
            object.__setattr__(self, "graph_ids", np.arange(1, self.X.shape[0] + 1))

    def __len__(self):
        return self.X.shape[0]

    @property
    def rows(self) -> list[FeatureVector]:
        return [FeatureVector(*r) for r in self.X.tolist()]

    @property
    def original_labels(self) -> list[int]:
        if not self.label_map:
            return self.labels.tolist()
        inverse = {v: k for k, v in self.label_map.items()}
        return [inverse[int(c)] for c in self.labels]

    def take(self, rows) -> "FeatureMatrix":
        return replace(self, X=self.X[rows], labels=self.labels[rows], graph_ids=self.graph_ids[rows])

    def select(self, columns: Sequence[int]) -> "FeatureMatrix":
        columns = list(columns)
        return replace(self, X=self.X[:, columns],
                       feature_names=tuple(self.feature_names[c] for c in columns))


SIGNIFICANT_DIGITS = 12


def _canonical(v: float) -> float:
    # isomorphic graphs can differ in the last bits through summation order;
    # rounding makes them tie exactly (and matches the CSV precision)
    return float(format(v, f".{SIGNIFICANT_DIGITS}g"))


def extract_features(g: Graph, tol: float = 1e-9, max_iter: int | None = None) -> FeatureVector:
    """Nine features of ``g``, each rounded to 12 significant digits."""
    stats = metrics.path_stats(g)
    spectrum = metrics.laplacian_spectrum_summary(g, tol, max_iter)
    return FeatureVector._make(_canonical(v) for v in (
        float(g.node_count),
        float(g.edge_count),
        metrics.average_degree(g),
        float(metrics.diameter(g, stats)),
        float(stats.closeness.mean()),
        float(stats.betweenness.mean()),
        metrics.average_clustering(g),
        spectrum.spectral_radius,
        spectrum.trace,
    ))


def _extract_chunk(args):
    start, graphs, tol, max_iter = args
    out = []
    for k, g in enumerate(graphs):
        try:
            out.append(extract_features(g, tol, max_iter))
        except Exception as exc:
            raise FeatureExtractionError(start + k, exc) from exc
    return out


def extract_all(ds: Dataset, jobs: int = 1, tol: float = 1e-9, max_iter: int | None = None) -> FeatureMatrix:
    """Feature matrix in dataset order; parallel runs fill fixed row slots."""
    if len(ds) == 0:
        raise ValueError("dataset is empty")
    if jobs <= 1:
        rows = _extract_chunk((0, ds.graphs, tol, max_iter))
    else:
        size = max(1, len(ds) // (4 * jobs))
        chunks = [(s, ds.graphs[s:s + size], tol, max_iter) for s in range(0, len(ds), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = [r for part in pool.map(_extract_chunk, chunks) for r in part]
    return FeatureMatrix(np.array(rows, dtype=np.float64), np.asarray(ds.labels),
                         label_map=dict(ds.label_map), name=ds.name)


def write_feature_csv(fm: FeatureMatrix, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for gid, lab, row in zip(fm.graph_ids.tolist(), fm.original_labels, fm.X.tolist()):
            w.writerow([gid, lab] + [format(v, ".12g") for v in row])
    return path


def read_feature_csv(path, name: str | None = None) -> FeatureMatrix:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        records = [r for r in reader if r]
    if not records:
        raise ValueError(f"{path}: no data rows")
    ids = np.array([int(r[0]) for r in records])
    labels, label_map = remap_labels([int(r[1]) for r in records])
    X = np.array([[float(v) for v in r[2:]] for r in records])
    return FeatureMatrix(X, labels, graph_ids=ids, label_map=label_map,
                         name=name or path.stem.removesuffix("_features"))


@dataclass(frozen=True)
class Standardizer:
    """Per-column z-score with population standard deviation.

    Columns whose deviation is zero pass through unchanged.
    """

    mean: np.ndarray
    std: np.ndarray

    @property
    def scaled(self) -> np.ndarray:
        return self.std > 0

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = X.copy()
        s = self.scaled
        out[..., s] = (X[..., s] - self.mean[s]) / self.std[s]
        return out

    def invert(self, Z: np.ndarray) -> np.ndarray:
        Z = np.asarray(Z, dtype=np.float64)
        out = Z.copy()
        s = self.scaled
        out[..., s] = Z[..., s] * self.std[s] + self.mean[s]
        return out


def standardize_fit(train) -> Standardizer:
    X = train.X if isinstance(train, FeatureMatrix) else np.asarray(train, dtype=np.float64)
    if X.shape[0] == 0:
        raise ValueError("cannot fit a standardizer on zero rows")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    # float noise on constant columns must not turn into a huge scale factor
    std[np.ptp(X, axis=0) == 0] = 0.0
    return Standardizer(mean, std)


def standardize_apply(s: Standardizer, x):
    if isinstance(x, FeatureMatrix):
        return replace(x, X=s.apply(x.X))
    return s.apply(x)
