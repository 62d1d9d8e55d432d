"""Acceptance suite: one check per criterion, each printed as a PASS/FAIL line.

Run under pytest (the lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``. Datasets are looked up in the
directories listed in $GRAPHFEAT_DATA and then in tests/data.
"""
from __future__ import annotations

import os
import sys
import time
from functools import lru_cache
from math import comb
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from conftest import ACCEPTANCE, dataset_dirs, random_graph, small_library  # noqa: E402

from graphfeat import metrics  # noqa: E402
from graphfeat.cli import main as cli_main  # noqa: E402
from graphfeat.evaluate import anova_oneway, cross_validate, pca2, pearson, stratified_folds, subset_search  # noqa: E402
from graphfeat.features import extract_all, standardize_fit  # noqa: E402
from graphfeat.graph import dataset_statistics, parse_tudataset  # noqa: E402
from graphfeat.learn import ForestConfig, KnnConfig, SvmConfig, knn_predict, rf_predict, rf_train  # noqa: E402
from graphfeat.learn.svm import train_binary  # noqa: E402
from graphfeat.linalg import jacobi_eigh, laplacian_power_iteration  # noqa: E402
from graphfeat.report import baselines  # noqa: E402

# TUDataset directory name -> table name
SMALL = {"MUTAG": "MUTAG", "PROTEINS": "PROTEINS", "IMDB-BINARY": "IMDB-B",
         "IMDB-MULTI": "IMDB-M", "PTC_MR": "PTC"}
LARGE = {"REDDIT-BINARY": "RDT-B", "REDDIT-MULTI-5K": "RDT-M5K", "COLLAB": "COLLAB",
         "NCI1": "NCI1", "NCI109": "NCI109"}
SEEDS = range(10)
POWER_BUDGET = 100_000


def record(num, label, ok, detail):
    ACCEPTANCE.setdefault(num, []).append((label, bool(ok), detail))
    return ok


@lru_cache(maxsize=None)
def load(dirname):
    d = dataset_dirs(dirname)
    if d is None:
        return None
    t0 = time.perf_counter()
    ds = parse_tudataset(d)
    return ds, time.perf_counter() - t0


@lru_cache(maxsize=None)
def features(dirname):
    return extract_all(load(dirname)[0], jobs=os.cpu_count() or 1)


@lru_cache(maxsize=None)
def cv_mean(dirname, clf, seed):
    fm = features(dirname)
    cfg = {"knn": KnnConfig(5), "svm": SvmConfig(C=10.0), "rf": ForestConfig(seed=seed)}[clf]
    return cross_validate(fm, cfg, stratified_folds(fm.labels, 5, seed)).mean_accuracy


def seed_sweep(dirname, clf):
    return float(np.mean([cv_mean(dirname, clf, s) for s in SEEDS]))


# 1 -------------------------------------------------------------------------

def check_ingestion():
    table = baselines()["statistics"]
    found = []
    ok_all = True
    for dirname, tname in {**SMALL, **LARGE}.items():
        got = load(dirname)
        if got is None:
            continue
        ds, secs = got
        s = dataset_statistics(ds)
        ref = table[tname]
        exact = all(s[k] == ref[k] for k in ("graphs", "max_nodes", "min_nodes", "max_edges",
                                              "min_edges", "classes"))
        close = abs(s["avg_nodes"] - ref["avg_nodes"]) <= 0.01 and abs(s["avg_edges"] - ref["avg_edges"]) <= 0.01
        fast = secs < 10 or dirname in LARGE
        ok = exact and close and fast
        ok_all &= ok
        found.append(f"{dirname} {s['graphs']} graphs, avg nodes {s['avg_nodes']:.4f}, "
                     f"avg edges {s['avg_edges']:.4f}, {secs:.2f}s{'' if ok else ' MISMATCH'}")
    if not found:
        return record(1, "ingestion", False, "no dataset available")
    return record(1, "ingestion", ok_all, "; ".join(found))


def test_criterion_1_ingestion():
    assert check_ingestion(), ACCEPTANCE[1][-1][2]


# 2 -------------------------------------------------------------------------

def spectral_graphs():
    rng = np.random.default_rng(20240601)
    graphs = [random_graph(rng, int(rng.integers(1, 51))) for _ in range(1000)]
    for dirname in {**SMALL, **LARGE}:
        got = load(dirname)
        if got is not None:
            graphs += got[0].graphs
    return graphs


def check_spectral():
    graphs = spectral_graphs()
    trace_bad = bound_bad = power_bad = power_checked = 0
    worst = 0.0
    for g in graphs:
        s = metrics.laplacian_spectrum_summary(g)
        if s.trace != 2 * g.edge_count:
            trace_bad += 1
        if g.edge_count:
            k = int(g.degrees.max())
            if not (k + 1 - 1e-6 <= s.spectral_radius <= 2 * k + 1e-6):
                bound_bad += 1
            if g.node_count <= 64:
                rho, _, conv = laplacian_power_iteration(g.indptr, g.indices, 1e-9, POWER_BUDGET)
                ref = jacobi_eigh(metrics.laplacian(g))[0][-1]
                power_checked += 1
                worst = max(worst, abs(rho - ref))
                if not conv or abs(rho - ref) >= 1e-6:
                    power_bad += 1
    ok = trace_bad == bound_bad == power_bad == 0
    return record(2, "spectral", ok,
                  f"{len(graphs)} graphs; trace mismatches {trace_bad}; bound violations {bound_bad}; "
                  f"power vs Jacobi on {power_checked} graphs: {power_bad} misses, worst {worst:.1e}")


def test_criterion_2_spectral():
    assert check_spectral(), ACCEPTANCE[2][-1][2]


# 3 -------------------------------------------------------------------------

def check_centrality():
    lib = small_library()
    worst = {"betweenness": 0.0, "closeness": 0.0, "clustering": 0.0}
    diam_bad = 0
    for g in lib:
        A = g.to_dense()
        st = metrics.path_stats(g)
        worst["betweenness"] = max(worst["betweenness"], np.abs(st.betweenness - oracles.betweenness(A)).max())
        worst["closeness"] = max(worst["closeness"], np.abs(st.closeness - oracles.closeness(A)).max())
        worst["clustering"] = max(worst["clustering"],
                                  np.abs(metrics.local_clustering(g) - oracles.clustering(A)).max())
        if metrics.diameter(g, st) != oracles.diameter(A):
            diam_bad += 1
    ok = all(v < 1e-9 for v in worst.values()) and diam_bad == 0
    detail = f"{len(lib)} graphs; " + ", ".join(f"max |d{k}| {v:.1e}" for k, v in worst.items()) + \
        f"; diameter mismatches {diam_bad}"
    return record(3, "centrality", ok, detail)


def test_criterion_3_centrality():
    assert check_centrality(), ACCEPTANCE[3][-1][2]


# 4 -------------------------------------------------------------------------

def separable_fixtures():
    rng = np.random.default_rng(77)
    out = []
    while len(out) < 6:
        w = rng.normal(size=2)
        X = rng.uniform(-3, 3, size=(int(rng.integers(6, 16)), 2))
        f = X @ w + rng.normal(scale=0.3)
        keep = np.abs(f) > 0.4 * np.linalg.norm(w)
        X, y = X[keep], np.where(f[keep] > 0, 1.0, -1.0)
        if len(np.unique(y)) == 2:
            out.append((X, y))
    return out


def check_classifiers():
    rng = np.random.default_rng(5)
    knn_bad = 0
    for _ in range(200):
        X = rng.integers(0, 5, size=(15, 3)).astype(float)
        y = rng.integers(0, 3, size=15)
        q = rng.integers(-1, 6, size=3).astype(float)
        k = int(rng.integers(1, 16))
        if knn_predict(X, q, KnnConfig(k), y) != oracles.knn_naive(X, y, q, k):
            knn_bad += 1
    record(4, "k-NN", knn_bad == 0, f"{knn_bad}/200 disagreements with naive scan")

    svm_ok, gaps = True, []
    for X, y in separable_fixtures():
        w, b, _, dual, _, conv = train_binary(X, y, SvmConfig(C=10.0))
        acc = float((np.sign(X @ w + b) == y).mean())
        primal, _ = oracles.svm_primal_grid(X, y, 10.0)
        gaps.append(abs(dual - primal))
        svm_ok &= conv and acc == 1.0 and gaps[-1] < 1e-2
    record(4, "SVM", svm_ok, f"{len(gaps)} fixtures, max |dual - grid primal| {max(gaps):.1e}")

    fm = features("MUTAG")
    cfg = ForestConfig(seed=11)
    a, b = rf_train(fm.X, fm.labels, cfg), rf_train(fm.X, fm.labels, cfg)
    same = all(np.array_equal(s.threshold, t.threshold) and np.array_equal(s.feature, t.feature)
               for s, t in zip(a.trees, b.trees))
    scale = np.array([2.5, 0.3, 7.0, 1.5, 40.0, 1e3, 0.05, 3.3, 0.9])
    c = rf_train(fm.X * scale, fm.labels, cfg)
    inv = all(np.array_equal(s.feature, t.feature) for s, t in zip(a.trees, c.trees)) and \
        np.array_equal(rf_predict(a, fm.X), rf_predict(c, fm.X * scale))
    record(4, "RF", same and inv, f"bit-reproducible {same}, scale-invariant {inv}")
    return all(p for _, p, _ in ACCEPTANCE[4])


def test_criterion_4_classifiers():
    assert check_classifiers(), [d for _, _, d in ACCEPTANCE[4]]


# 5 -------------------------------------------------------------------------

ACCURACY_TARGETS = [("MUTAG", "rf"), ("PROTEINS", "rf"), ("IMDB-BINARY", "rf"),
                    ("IMDB-MULTI", "rf"), ("PTC_MR", "rf"), ("PTC_MR", "svm")]


def check_accuracy(dirname, clf):
    label = f"{dirname} {clf}"
    ref = baselines()["reference_runs"][clf][baselines()["datasets"].index(SMALL[dirname])]
    if load(dirname) is None:
        return record(5, label, False, f"dataset not available (target {ref:.2f} +/- 5)")
    t0 = time.perf_counter()
    mean = seed_sweep(dirname, clf)
    secs = time.perf_counter() - t0
    ok = abs(mean - ref) <= 5.0
    return record(5, label, ok, f"mean over {len(SEEDS)} seeds {mean:.2f} vs {ref:.2f} +/- 5 ({secs:.0f}s)")


@pytest.mark.parametrize("dirname,clf", ACCURACY_TARGETS)
def test_criterion_5_accuracy(dirname, clf):
    assert check_accuracy(dirname, clf), ACCEPTANCE[5][-1][2]


# 6 -------------------------------------------------------------------------

def check_consistency():
    avail = [d for d in SMALL if load(d) is not None]
    if len(avail) < 5:
        return record(6, "consistency", False,
                      f"needs 5 small datasets, {len(avail)} available ({', '.join(avail) or 'none'})")
    acc = {c: [seed_sweep(d, c) for d in avail] for c in ("knn", "svm", "rf")}
    p = anova_oneway(list(acc.values())).p_value
    rs = {f"{a}-{b}": pearson(acc[a], acc[b]) for a, b in (("knn", "svm"), ("knn", "rf"), ("svm", "rf"))}
    ok = p > 0.3 and all(r > 0.85 for r in rs.values())
    return record(6, "consistency", ok,
                  f"ANOVA p {p:.4f}; " + ", ".join(f"r({k}) {v:.3f}" for k, v in rs.items()))


def test_criterion_6_consistency():
    assert check_consistency(), ACCEPTANCE[6][-1][2]


# 7 -------------------------------------------------------------------------

def check_subsets():
    fm = features("MUTAG")
    folds = stratified_folds(fm.labels, 5, 0)
    t0 = time.perf_counter()
    found = subset_search(fm, ForestConfig(seed=0), folds, range(1, 10), jobs=os.cpu_count() or 1)
    secs = time.perf_counter() - t0
    counts_ok = all(found[k].count == comb(9, k) for k in range(1, 10))
    full = found[9].best.mean_accuracy
    best_small = max(found[k].best.mean_accuracy for k in range(1, 9))
    k_best = max(range(1, 9), key=lambda k: found[k].best.mean_accuracy)
    ok = counts_ok and best_small >= full - 1.0 and secs < 30 * 60
    curve = " ".join(f"{found[k].best.mean_accuracy:.1f}" for k in range(1, 10))
    return record(7, "subsets", ok,
                  f"counts C(9,k) {counts_ok}; curve k=1..9: {curve}; best k<9 {best_small:.2f} "
                  f"(k={k_best}) vs full {full:.2f}; {secs:.0f}s")


def test_criterion_7_subsets():
    assert check_subsets(), ACCEPTANCE[7][-1][2]


# 8 -------------------------------------------------------------------------

def check_pca(tmp_dir: Path):
    fm = features("MUTAG")
    Z = standardize_fit(fm.X).apply(fm.X)
    emb = pca2(Z)
    ortho = np.abs(emb.component_vectors @ emb.component_vectors.T - np.eye(2)).max()
    Zc = Z - Z.mean(axis=0)
    w, V = np.linalg.eigh(np.cov(Z, rowvar=False))
    ref = V[:, ::-1][:, :2].copy()
    for k in range(2):
        ref[:, k] *= np.sign(ref[np.argmax(np.abs(ref[:, k])), k])
    coord_err = np.abs(emb.coordinates - Zc @ ref).max()
    rc = cli_main(["pca", "--data", str(dataset_dirs("MUTAG")), "--out", str(tmp_dir), "--jobs", "1"])
    rows = len((tmp_dir / "MUTAG_pca.csv").read_text().splitlines()) - 1 if rc == 0 else -1
    ok = ortho < 1e-9 and coord_err < 1e-6 and rows == len(fm)
    return record(8, "pca", ok, f"orthonormality error {ortho:.1e}; coordinate error {coord_err:.1e}; "
                                f"CSV rows {rows} for {len(fm)} graphs")


def test_criterion_8_pca(tmp_path):
    assert check_pca(tmp_path), ACCEPTANCE[8][-1][2]


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        checks = [check_ingestion, check_spectral, check_centrality, check_classifiers,
                  *[lambda d=d, c=c: check_accuracy(d, c) for d, c in ACCURACY_TARGETS],
                  check_consistency, check_subsets, lambda: check_pca(Path(tmp))]
        for check in checks:
            check()
    failed = 0
    for num in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[num]
        ok = all(p for _, p, _ in parts)
        failed += not ok
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'} | " +
              "; ".join(f"{label}: {d}" for label, _, d in parts))
    sys.exit(1 if failed else 0)
