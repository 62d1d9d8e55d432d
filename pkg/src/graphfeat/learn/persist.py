"""Versioned JSON documents for trained models.

Layout (``format_version`` 1)::

    {"format": "graphfeat-model", "format_version": 1, "kind": "knn"|"svm"|"rf",
     "standardizer": {"mean": [...], "std": [...]} | null, "model": {...}}

``knn`` stores ``k`` and the training matrix and labels, ``svm`` the class
list, ``C`` and per-pair ``w``/``b``, ``rf`` the config and every tree's
flat node arrays.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..features import Standardizer
from .forest import Forest, ForestConfig, Tree
from .knn import KNNClassifier
from .svm import BinarySvm, SvmModel

FORMAT = "graphfeat-model"
FORMAT_VERSION = 1


def _encode(kind, model):
    if kind == "knn":
        return {"k": model.config.k, "X": model.X_.tolist(), "y": model.y_.tolist()}
    if kind == "svm":
        return {
            "classes": model.classes.tolist(),
            "C": model.C,
            "pairs": [{"positive": p.positive_class, "negative": p.negative_class,
                       "w": p.w.tolist(), "b": p.b, "converged": p.converged}
                      for p in model.pairs],
        }
    if kind == "rf":
        c = model.config
        return {
            "config": {"trees": c.trees, "max_depth": c.max_depth, "seed": c.seed,
                       "max_features": c.max_features},
            "n_classes": model.n_classes,
            "n_features": model.n_features,
            "trees": [{"feature": t.feature.tolist(), "threshold": t.threshold.tolist(),
                       "left": t.left.tolist(), "right": t.right.tolist(),
                       "counts": t.counts.tolist(), "gain": t.gain.tolist()}
                      for t in model.trees],
        }
    raise ValueError(f"unknown model kind {kind!r}")


def _decode(kind, doc):
    if kind == "knn":
        return KNNClassifier(doc["k"]).fit(np.array(doc["X"], dtype=np.float64),
                                           np.array(doc["y"], dtype=np.int64))
    if kind == "svm":
        pairs = [BinarySvm(p["positive"], p["negative"], np.array(p["w"]), p["b"],
                           np.zeros(0), float("nan"), 0, p["converged"])
                 for p in doc["pairs"]]
        return SvmModel(np.array(doc["classes"]), pairs, doc["C"])
    if kind == "rf":
        trees = [Tree(np.array(t["feature"], dtype=np.int64), np.array(t["threshold"]),
                      np.array(t["left"], dtype=np.int64), np.array(t["right"], dtype=np.int64),
                      np.array(t["counts"]).reshape(len(t["feature"]), -1), np.array(t["gain"]))
                 for t in doc["trees"]]
        return Forest(trees, doc["n_classes"], doc["n_features"], ForestConfig(**doc["config"]))
    raise ValueError(f"unknown model kind {kind!r}")


def model_kind(model) -> str:
    if isinstance(model, KNNClassifier):
        return "knn"
    if isinstance(model, SvmModel):
        return "svm"
    if isinstance(model, Forest):
        return "rf"
    raise TypeError(f"cannot serialize {type(model).__name__}")


def dump_model(model, path, standardizer: Standardizer | None = None) -> Path:
    kind = model_kind(model)
    doc = {
        "format": FORMAT,
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "standardizer": None if standardizer is None else
        {"mean": standardizer.mean.tolist(), "std": standardizer.std.tolist()},
        "model": _encode(kind, model),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc))
    return path


def load_model(path):
    """Return ``(model, standardizer_or_None)``."""
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != FORMAT:
        raise ValueError(f"{path}: not a {FORMAT} document")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format_version {doc.get('format_version')}")
    std = doc.get("standardizer")
    scaler = None if std is None else Standardizer(np.array(std["mean"]), np.array(std["std"]))
    return _decode(doc["kind"], doc["model"]), scaler
