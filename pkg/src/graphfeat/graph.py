"""Graph representation, TUDataset ingestion and connectivity primitives."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class IngestError(Exception):
    """A dataset could not be read."""


class FormatError(IngestError):
    """A dataset file violates the TUDataset layout."""

    def __init__(self, path, line, message):
        self.path = Path(path)
        self.line = line
        where = f"{self.path.name}:{line}" if line is not None else self.path.name
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph stored as sorted neighbour lists (CSR).

    ``indices[indptr[i]:indptr[i + 1]]`` are the neighbours of node ``i`` in
    ascending order. Build instances with :meth:`from_edges`.
    """

    node_count: int
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a simple graph; self-loops are dropped and repeated pairs merged."""
        if n < 0:
            raise ValueError("node count must be nonnegative")
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise ValueError(f"edge endpoint outside 0..{n - 1}")
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        pairs = np.sort(pairs, axis=1)
        pairs = np.unique(pairs, axis=0)
        src = np.concatenate([pairs[:, 0], pairs[:, 1]])
        dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n, indptr, dst.astype(np.int64))

    @property
    def edge_count(self) -> int:
        return int(self.indices.size // 2)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def adj(self) -> list[list[int]]:
        """Neighbour lists as plain Python lists (fast for BFS loops)."""
        ind = self.indices.tolist()
        ptr = self.indptr.tolist()
        return [ind[ptr[i]:ptr[i + 1]] for i in range(self.node_count)]

    @cached_property
    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges with ``u < v``, lexicographically sorted."""
        src = np.repeat(np.arange(self.node_count), self.degrees)
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        k = np.searchsorted(nb, v)
        return bool(k < nb.size and nb[k] == v)

    def subgraph(self, nodes: Sequence[int]) -> "Graph":
        """Induced subgraph; node ``nodes[k]`` becomes node ``k``."""
        nodes = np.asarray(nodes, dtype=np.int64)
        remap = np.full(self.node_count, -1, dtype=np.int64)
        remap[nodes] = np.arange(nodes.size)
        e = self.edges
        if e.size:
            e = remap[e]
            e = e[(e >= 0).all(axis=1)]
        return Graph.from_edges(nodes.size, e)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Isomorphic copy in which old node ``i`` becomes ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return Graph.from_edges(self.node_count, perm[self.edges] if self.edge_count else [])

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.node_count, self.node_count))
        e = self.edges
        a[e[:, 0], e[:, 1]] = 1.0
        a[e[:, 1], e[:, 0]] = 1.0
        return a

    def __repr__(self):
        return f"Graph(n={self.node_count}, m={self.edge_count})"


@dataclass(frozen=True)
class Dataset:
    name: str
    graphs: list[Graph]
    labels: np.ndarray
    label_map: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.graphs) != len(self.labels):
            raise ValueError("graphs and labels differ in length")

    def __len__(self):
        return len(self.graphs)

    @property
    def n_classes(self) -> int:
        return len(self.label_map)

    @property
    def original_labels(self) -> list[int]:
        inverse = {v: k for k, v in self.label_map.items()}
        return [inverse[int(c)] for c in self.labels]


@dataclass(frozen=True)
class ComponentPartition:
    component_id: np.ndarray
    component_sizes: list[int]

    def __len__(self):
        return len(self.component_sizes)


def remap_labels(raw: Sequence[int]) -> tuple[np.ndarray, dict[int, int]]:
    """Map labels to 0..C-1 in order of first appearance."""
    label_map: dict[int, int] = {}
    for lab in raw:
        label_map.setdefault(int(lab), len(label_map))
    return np.array([label_map[int(x)] for x in raw], dtype=np.int64), label_map


def _read_lines(path: Path) -> list[str]:
    if not path.is_file():
        raise IngestError(f"missing file: {path}")
    text = path.read_text()
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError(path, None, "file is empty")
    return lines


def _parse_ints(path: Path, lines: list[str], width: int) -> np.ndarray:
    out = np.empty((len(lines), width), dtype=np.int64)
    for k, line in enumerate(lines):
        parts = line.split(",")
        if len(parts) != width:
            raise FormatError(path, k + 1, f"expected {width} comma-separated integers, got {line!r}")
        try:
            out[k] = [int(p) for p in parts]
        except ValueError:
            raise FormatError(path, k + 1, f"not an integer: {line!r}") from None
    return out


def parse_tudataset(directory, name: str | None = None) -> Dataset:
    """Read ``{name}_A.txt``, ``{name}_graph_indicator.txt`` and ``{name}_graph_labels.txt``.

    Node and edge attribute files are ignored. Self-loops are dropped and
    repeated pairs merged; a warning reports how many were touched.
    """
    directory = Path(directory)
    name = name or directory.name
    a_path = directory / f"{name}_A.txt"
    ind_path = directory / f"{name}_graph_indicator.txt"
    lab_path = directory / f"{name}_graph_labels.txt"
    for p in (a_path, ind_path, lab_path):
        if not p.is_file():
            raise IngestError(f"missing file: {p}")

    raw_labels = _parse_ints(lab_path, _read_lines(lab_path), 1)[:, 0]
    n_graphs = raw_labels.size
    indicator = _parse_ints(ind_path, _read_lines(ind_path), 1)[:, 0]
    bad = np.flatnonzero((indicator < 1) | (indicator > n_graphs))
    if bad.size:
        k = int(bad[0])
        raise FormatError(ind_path, k + 1, f"node {k + 1} refers to graph {indicator[k]}, "
                                           f"but only {n_graphs} graphs are labelled")
    gid = indicator - 1
    sizes = np.bincount(gid, minlength=n_graphs)
    empty = np.flatnonzero(sizes == 0)
    if empty.size:
        raise FormatError(ind_path, None, f"graph {empty[0] + 1} has no nodes")
    # local id of each global node = its rank among nodes of the same graph
    order = np.argsort(gid, kind="stable")
    local = np.empty_like(gid)
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    local[order] = np.arange(gid.size) - np.repeat(starts, sizes)

    arcs = _parse_ints(a_path, _read_lines(a_path), 2) - 1
    bad = np.flatnonzero(((arcs < 0) | (arcs >= gid.size)).any(axis=1))
    if bad.size:
        k = int(bad[0])
        raise FormatError(a_path, k + 1, f"node id outside 1..{gid.size}: {arcs[k] + 1}")
    g_of_arc = gid[arcs[:, 0]]
    bad = np.flatnonzero(g_of_arc != gid[arcs[:, 1]])
    if bad.size:
        k = int(bad[0])
        raise FormatError(a_path, k + 1, f"edge {arcs[k, 0] + 1}-{arcs[k, 1] + 1} crosses two graphs")

    loops = int((arcs[:, 0] == arcs[:, 1]).sum())
    repeats = arcs.shape[0] - np.unique(arcs, axis=0).shape[0]
    if loops or repeats:
        logger.warning("%s: dropped %d self-loops, merged %d repeated edge lines", name, loops, repeats)

    by_graph = np.argsort(g_of_arc, kind="stable")
    counts = np.bincount(g_of_arc, minlength=n_graphs)
    bounds = np.concatenate([[0], np.cumsum(counts)])
    local_arcs = local[arcs]
    graphs = []
    for g in range(n_graphs):
        sel = by_graph[bounds[g]:bounds[g + 1]]
        graphs.append(Graph.from_edges(int(sizes[g]), local_arcs[sel]))
    labels, label_map = remap_labels(raw_labels.tolist())
    return Dataset(name, graphs, labels, label_map)


def write_tudataset(ds: Dataset, directory, name: str | None = None) -> Path:
    """Write ``ds`` in TUDataset layout (both arc directions per edge)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    name = name or ds.name
    offset = 0
    a_lines, ind_lines = [], []
    for g, graph in enumerate(ds.graphs):
        for u, v in graph.edges.tolist():
            a_lines.append(f"{u + offset + 1}, {v + offset + 1}")
            a_lines.append(f"{v + offset + 1}, {u + offset + 1}")
        ind_lines.extend([str(g + 1)] * graph.node_count)
        offset += graph.node_count
    (directory / f"{name}_A.txt").write_text("\n".join(a_lines) + "\n")
    (directory / f"{name}_graph_indicator.txt").write_text("\n".join(ind_lines) + "\n")
    (directory / f"{name}_graph_labels.txt").write_text(
        "\n".join(str(x) for x in ds.original_labels) + "\n")
    return directory


def dataset_statistics(ds: Dataset) -> dict:
    """Summary matching the dataset tables: counts, node/edge extrema, classes."""
    n = np.array([g.node_count for g in ds.graphs])
    m = np.array([g.edge_count for g in ds.graphs])
    return {
        "name": ds.name,
        "graphs": len(ds),
        "avg_nodes": float(n.mean()),
        "max_nodes": int(n.max()),
        "min_nodes": int(n.min()),
        "avg_edges": float(m.mean()),
        "max_edges": int(m.max()),
        "min_edges": int(m.min()),
        "classes": ds.n_classes,
    }


def connected_components(g: Graph) -> ComponentPartition:
    """BFS labelling; component ids ordered by smallest contained node."""
    comp = np.full(g.node_count, -1, dtype=np.int64)
    sizes: list[int] = []
    adj = g.adj
    for start in range(g.node_count):
        if comp[start] >= 0:
            continue
        cid = len(sizes)
        comp[start] = cid
        queue = deque([start])
        size = 0
        while queue:
            v = queue.popleft()
            size += 1
            for w in adj[v]:
                if comp[w] < 0:
                    comp[w] = cid
                    queue.append(w)
        sizes.append(size)
    return ComponentPartition(comp, sizes)


def largest_component_nodes(g: Graph) -> np.ndarray:
    if g.node_count == 0:
        raise ValueError("no component: graph is empty")
    part = connected_components(g)
    # argmax returns the first maximum, i.e. the component with the smallest node id
    best = int(np.argmax(part.component_sizes))
    return np.flatnonzero(part.component_id == best)


def largest_component_subgraph(g: Graph) -> Graph:
    return g.subgraph(largest_component_nodes(g))
