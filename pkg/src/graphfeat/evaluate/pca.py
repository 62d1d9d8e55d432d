from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..linalg import jacobi_eigh


@dataclass(frozen=True)
class Embedding2D:
    coordinates: np.ndarray         # (rows, 2)
    component_vectors: np.ndarray   # (2, d), orthonormal rows
    explained_variance: np.ndarray  # (2,), descending


def pca2(X) -> Embedding2D:
    """Project onto the top two eigenvectors of the sample covariance.

    Each component is signed so its largest-magnitude entry is positive.
    Callers standardize first; this only centres.
    """
    X = np.asarray(X.X if hasattr(X, "X") else X, dtype=np.float64)
    if X.shape[0] < 2:
        raise ValueError("PCA needs at least two rows")
    if (np.ptp(X, axis=0) > 0).sum() < 2:
        raise ValueError("PCA needs at least two non-constant columns")
    Xc = X - X.mean(axis=0)
    cov = Xc.T @ Xc / (X.shape[0] - 1)
    w, V = jacobi_eigh(cov)
    order = np.argsort(-w, kind="stable")[:2]
    comps = V[:, order].T.copy()
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1
    var = np.clip(w[order], 0.0, None)
    return Embedding2D(Xc @ comps.T, comps, var)
