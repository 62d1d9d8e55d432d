from __future__ import annotations

import itertools
import os
from pathlib import Path

import numpy as np
import pytest

from graphfeat.graph import Graph

DATA_DIR = Path(__file__).parent / "data"

# criterion number -> list of (label, passed, detail), filled by test_acceptance
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def dataset_dirs(name: str) -> Path | None:
    """Locate a TUDataset directory under $GRAPHFEAT_DATA entries, then tests/data."""
    roots = [Path(p) for p in os.environ.get("GRAPHFEAT_DATA", "").split(os.pathsep) if p]
    for root in roots + [DATA_DIR]:
        d = root / name
        if (d / f"{name}_A.txt").is_file():
            return d
    return None


def random_graph(rng: np.random.Generator, n: int, p: float | None = None) -> Graph:
    if p is None:
        p = rng.uniform(0.05, 0.9)
    iu = np.triu_indices(n, 1)
    keep = rng.random(iu[0].size) < p
    return Graph.from_edges(n, zip(iu[0][keep].tolist(), iu[1][keep].tolist()))


def all_graphs(n: int):
    """Every labelled simple graph on n nodes."""
    pairs = list(itertools.combinations(range(n), 2))
    for bits in range(1 << len(pairs)):
        yield Graph.from_edges(n, [e for k, e in enumerate(pairs) if bits >> k & 1])


def named_graphs() -> dict[str, Graph]:
    def path(n):
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    def cycle(n):
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    def star(n):
        return Graph.from_edges(n, [(0, i) for i in range(1, n)])

    def complete(n):
        return Graph.from_edges(n, itertools.combinations(range(n), 2))

    petersen = [(i, (i + 1) % 5) for i in range(5)] + [(i, i + 5) for i in range(5)] + \
        [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    out = {}
    for n in (6, 9, 12):
        out[f"path{n}"] = path(n)
        out[f"cycle{n}"] = cycle(n)
        out[f"star{n}"] = star(n)
        out[f"complete{n}"] = complete(n)
    out["petersen"] = Graph.from_edges(10, petersen)
    out["k3_4"] = Graph.from_edges(7, [(i, j) for i in range(3) for j in range(3, 7)])
    out["two_triangles_and_isolate"] = Graph.from_edges(7, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    out["grid3x4"] = Graph.from_edges(12, [(r * 4 + c, r * 4 + c + 1) for r in range(3) for c in range(3)] +
                                      [(r * 4 + c, r * 4 + c + 4) for r in range(2) for c in range(4)])
    return out


def small_library(rng_seed: int = 7, random_count: int = 200) -> list[Graph]:
    """Exhaustive graphs on up to 5 nodes, named graphs and random graphs with n <= 12."""
    lib = [g for n in range(1, 6) for g in all_graphs(n)]
    lib += list(named_graphs().values())
    rng = np.random.default_rng(rng_seed)
    lib += [random_graph(rng, int(rng.integers(1, 13))) for _ in range(random_count)]
    return lib


@pytest.fixture(scope="session")
def mutag_dir() -> Path:
    d = dataset_dirs("MUTAG")
    assert d is not None, "MUTAG test data missing"
    return d


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[num]
        ok = all(p for _, p, _ in parts)
        detail = "; ".join(f"{label}: {d}" for label, _, d in parts)
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'} | {detail}")
