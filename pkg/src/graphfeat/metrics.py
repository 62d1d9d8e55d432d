"""Structural quantities of a single graph."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import Graph, largest_component_nodes
from .linalg import jacobi_eigh, laplacian_power_iteration

JACOBI_THRESHOLD = 64
# largest n for which a non-converged power iteration may fall back to dense Jacobi
JACOBI_FALLBACK_MAX = 512


class SpectralConvergenceError(ArithmeticError):
    def __init__(self, estimate, iterations):
        self.estimate = estimate
        self.iterations = iterations
        super().__init__(f"power iteration did not converge after {iterations} "
                         f"iterations (best estimate {estimate!r})")


@dataclass(frozen=True)
class SpectralSummary:
    spectral_radius: float
    trace: float
    iterations_used: int
    converged: bool
    method: str


@dataclass(frozen=True)
class PathStats:
    """Per-node results of one all-sources shortest-path pass."""

    betweenness: np.ndarray   # normalized, unordered pairs
    closeness: np.ndarray
    eccentricity: np.ndarray  # within the node's own component


def _require_nodes(g: Graph):
    if g.node_count == 0:
        raise ValueError("metric undefined on a graph with no nodes")


def path_stats(g: Graph) -> PathStats:
    """Brandes dependency accumulation plus distance sums, one BFS per source."""
    _require_nodes(g)
    n = g.node_count
    adj = g.adj
    between = [0.0] * n
    close = [0.0] * n
    ecc = [0] * n
    for s in range(n):
        dist = [-1] * n
        sigma = [0] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        dist[s] = 0
        sigma[s] = 1
        order = []
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    queue.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        reach = len(order)
        total = sum(dist[v] for v in order)
        ecc[s] = dist[order[-1]]
        if reach > 1:
            close[s] = (reach - 1) / total * (reach - 1) / (n - 1)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                between[w] += delta[w]
    b = np.array(between)
    # every unordered pair was visited from both ends
    b = b / ((n - 1) * (n - 2)) if n > 2 else np.zeros(n)
    return PathStats(b, np.array(close), np.array(ecc, dtype=np.int64))


def average_degree(g: Graph) -> float:
    _require_nodes(g)
    return 2.0 * g.edge_count / g.node_count


def diameter(g: Graph, stats: PathStats | None = None) -> int:
    """Largest eccentricity inside the largest connected component."""
    _require_nodes(g)
    if stats is None:
        stats = path_stats(g)
    return int(stats.eccentricity[largest_component_nodes(g)].max())


def closeness_centrality(g: Graph) -> np.ndarray:
    """Per-node closeness over the reachable set, scaled by ``(n_r - 1)/(n - 1)``."""
    return path_stats(g).closeness


def average_closeness(g: Graph) -> float:
    return float(closeness_centrality(g).mean())


def betweenness_centrality(g: Graph) -> np.ndarray:
    return path_stats(g).betweenness


def average_betweenness(g: Graph) -> float:
    return float(betweenness_centrality(g).mean())


def local_clustering(g: Graph) -> np.ndarray:
    """Fraction of connected neighbour pairs; 0 for degree below 2."""
    _require_nodes(g)
    nbr = [set(a) for a in g.adj]
    out = np.zeros(g.node_count)
    for i, ni in enumerate(nbr):
        k = len(ni)
        if k < 2:
            continue
        links = sum(len(ni & nbr[j]) for j in ni) // 2
        out[i] = 2.0 * links / (k * (k - 1))
    return out


def average_clustering(g: Graph) -> float:
    return float(local_clustering(g).mean())


def laplacian(g: Graph) -> np.ndarray:
    return np.diag(g.degrees.astype(float)) - g.to_dense()


def laplacian_spectrum_summary(g: Graph, tol: float = 1e-9, max_iter: int | None = None) -> SpectralSummary:
    """Spectral radius and trace of ``L = D - A``.

    The trace is the degree sum. The radius comes from dense Jacobi for
    ``n <= 64``, otherwise from sparse power iteration with a Jacobi fallback
    when it fails to converge and the graph is small enough to densify.
    """
    _require_nodes(g)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = g.node_count
    trace = float(g.degrees.sum())
    if g.edge_count == 0:
        return SpectralSummary(0.0, 0.0, 0, True, "empty")
    if n <= JACOBI_THRESHOLD:
        return SpectralSummary(float(jacobi_eigh(laplacian(g))[0][-1]), trace, 0, True, "jacobi")
    if max_iter is None:
        max_iter = 10 * n + 1000
    rho, it, ok = laplacian_power_iteration(g.indptr, g.indices, tol, max_iter)
    if ok:
        return SpectralSummary(rho, trace, it, True, "power")
    if n <= JACOBI_FALLBACK_MAX:
        # converged=False records that the power path failed and Jacobi answered
        return SpectralSummary(float(jacobi_eigh(laplacian(g))[0][-1]), trace, it, False, "jacobi")
    raise SpectralConvergenceError(rho, it)
