"""JSON and aligned-text renderings of experiment results."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

CLASSIFIER_LABELS = {"knn": "k-NN", "svm": "SVM", "rf": "Random Forest"}


@lru_cache(maxsize=None)
def baselines() -> dict:
    """Published reference accuracies and dataset statistics (read-only)."""
    with resources.files("graphfeat.data").joinpath("baselines.json").open() as fh:
        return json.load(fh)


def canonical_name(name: str) -> str:
    """Map a TUDataset directory name (``IMDB-BINARY``) to its table name (``IMDB-B``)."""
    return baselines()["aliases"].get(name, name)


def reference_accuracy(method: str, dataset: str) -> float | None:
    data = baselines()
    ds = canonical_name(dataset)
    if ds not in data["datasets"]:
        return None
    col = data["datasets"].index(ds)
    table = data["reference_runs"] if method in data["reference_runs"] else data["methods"]
    return table[method][col]


def format_table(header: Sequence[str], rows: Sequence[Sequence], first_width: int | None = None) -> str:
    cells = [[str(h) for h in header]] + [[_cell(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    if first_width:
        widths[0] = max(widths[0], first_width)
    lines = []
    for k, r in enumerate(cells):
        line = r[0].ljust(widths[0]) + "  " + "  ".join(c.rjust(w) for c, w in zip(r[1:], widths[1:]))
        lines.append(line.rstrip())
        if k == 0:
            lines.append("-" * len(lines[0]))
    return "\n".join(lines)


def _cell(v) -> str:
    if v is None:
        return "N/A"
    if isinstance(v, float):
        return f"{v:.2f}"
    return str(v)


def statistics_table(stats: Sequence[Mapping]) -> str:
    fields = ["graphs", "avg_nodes", "max_nodes", "min_nodes", "avg_edges", "max_edges",
              "min_edges", "classes"]
    header = ["Dataset"] + [s["name"] for s in stats]
    rows = [[f] + [s[f] for s in stats] for f in fields]
    return format_table(header, rows)


def cv_table(results: Sequence[Mapping]) -> str:
    """One row per classifier: per-fold accuracies (%) and the mean."""
    k = max(len(r["fold_accuracies"]) for r in results)
    header = ["Classifier"] + [f"fold{i + 1}" for i in range(k)] + ["mean"]
    rows = []
    for r in results:
        folds = [100.0 * a for a in r["fold_accuracies"]]
        rows.append([CLASSIFIER_LABELS.get(r["classifier"], r["classifier"])] + folds + [r["mean_accuracy"]])
    return format_table(header, rows)


def comparison_table(reproduced: Mapping[str, Mapping[str, float]]) -> str:
    """Published baselines next to this run's means, datasets as columns.

    ``reproduced`` maps dataset name -> classifier id -> mean accuracy (%).
    """
    data = baselines()
    datasets = [canonical_name(d) for d in reproduced]
    cols = [data["datasets"].index(d) if d in data["datasets"] else None for d in datasets]
    rows = []
    for method, values in data["methods"].items():
        rows.append([method] + [values[c] if c is not None else None for c in cols])
    for clf, values in data["reference_runs"].items():
        rows.append([f"{CLASSIFIER_LABELS[clf]} (published)"] +
                    [values[c] if c is not None else None for c in cols])
    for clf in ("knn", "svm", "rf"):
        rows.append([f"{CLASSIFIER_LABELS[clf]} (this run)"] +
                    [reproduced[d].get(clf) for d in reproduced])
    return format_table(["Method"] + datasets, rows)


def importance_table(names: Sequence[str], importance: np.ndarray) -> str:
    order = np.argsort(-importance, kind="stable")
    return format_table(["Feature", "importance"], [[names[i], f"{importance[i]:.4f}"] for i in order])


def subsets_table(per_k: Mapping[int, Mapping]) -> str:
    rows = [[k, v["count"], v["best"]["mean_accuracy"], ",".join(v["best_features"])]
            for k, v in sorted(per_k.items())]
    return format_table(["k", "masks", "best acc", "best features"], rows)


def write_json(path, doc) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
