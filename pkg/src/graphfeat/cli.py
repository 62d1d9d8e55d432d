"""Command-line entry point: ``graphfeat <command> --data DIR [options]``."""
from __future__ import annotations

import argparse
import logging
import os
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .evaluate import anova_oneway, cross_validate, pca2, pearson, stratified_folds, subset_search
from .features import (FeatureMatrix, extract_all, read_feature_csv, standardize_fit,
                       write_feature_csv)
from .graph import dataset_statistics, parse_tudataset
from .learn import (ForestConfig, KnnConfig, SvmConfig, dump_model, load_model, make_classifier,
                    rf_feature_importance, rf_train)
from .learn.persist import model_kind
from .report import (comparison_table, cv_table, importance_table, subsets_table,
                     write_json)

logger = logging.getLogger("graphfeat")

CLASSIFIERS = ("knn", "svm", "rf")


class CliError(Exception):
    pass


def default_jobs() -> int:
    env = os.environ.get("GRAPHFEAT_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise CliError(f"GRAPHFEAT_JOBS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", action="append", type=Path, metavar="DIR",
                        help="TUDataset directory (repeatable for report)")
    common.add_argument("--name", help="dataset file prefix (default: directory name)")
    common.add_argument("--features", type=Path, metavar="CSV",
                        help="use a feature CSV instead of parsing --data")
    common.add_argument("--out", type=Path, default=Path("results"), metavar="DIR")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--jobs", type=_positive_int, default=None,
                        help="worker processes (default: $GRAPHFEAT_JOBS or CPU count)")
    common.add_argument("-v", "--verbose", action="store_true")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--folds", type=_positive_int, default=5)
    model.add_argument("--C", type=_positive_float, default=10.0, dest="C")
    model.add_argument("--trees", type=_positive_int, default=200)
    model.add_argument("--depth", type=_positive_int, default=5)
    model.add_argument("--no-scale", action="store_true",
                       help="feed raw features to k-NN, SVM and PCA")

    knn_k = argparse.ArgumentParser(add_help=False)
    knn_k.add_argument("--k", type=_positive_int, default=5, help="neighbours for k-NN")

    parser = argparse.ArgumentParser(prog="graphfeat", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("extract", parents=[common], help="write the feature CSV and dataset summary")
    p = sub.add_parser("cv", parents=[common, model, knn_k], help="K-fold cross-validation")
    p.add_argument("--classifier", choices=CLASSIFIERS + ("all",), default="all")
    sub.add_parser("pca", parents=[common, model], help="two-dimensional PCA embedding")
    sub.add_parser("importance", parents=[common, model], help="random-forest feature importance")
    p = sub.add_parser("subsets", parents=[common, model], help="best feature subset per size")
    p.add_argument("--k", type=_positive_int, action="append", dest="sizes", metavar="SIZE",
                   help="subset size to search (repeatable; default 1..9)")
    p = sub.add_parser("report", parents=[common, model, knn_k],
                       help="cross-validate datasets and compare with published baselines")
    p = sub.add_parser("train", parents=[common, model, knn_k], help="fit one model on all rows")
    p.add_argument("--classifier", choices=CLASSIFIERS, default="rf")
    p.add_argument("--model", type=Path, help="output path (default OUT/NAME_CLASSIFIER.json)")
    p = sub.add_parser("predict", parents=[common], help="label graphs with a saved model")
    p.add_argument("--model", type=Path, required=True)
    return parser


def classifier_config(name, args):
    if name == "knn":
        return KnnConfig(args.k)
    if name == "svm":
        return SvmConfig(C=args.C)
    return ForestConfig(trees=args.trees, max_depth=args.depth, seed=args.seed)


def _dataset_name(args, data: Path | None) -> str:
    if args.name:
        return args.name
    if data is not None:
        return data.name
    return args.features.stem.removesuffix("_features")


def load_features(args, data: Path | None, write=True) -> tuple[FeatureMatrix, dict | None]:
    """Feature matrix from --features, or parsed and extracted from ``data``."""
    if args.features is not None:
        fm = read_feature_csv(args.features, _dataset_name(args, data))
        return fm, None
    if data is None:
        raise CliError("either --data or --features is required")
    name = _dataset_name(args, data)
    ds = parse_tudataset(data, name)
    stats = dataset_statistics(ds)
    fm = extract_all(ds, jobs=args.jobs)
    if write:
        write_feature_csv(fm, args.out / f"{name}_features.csv")
    return fm, stats


def _single_data(args) -> Path | None:
    if args.data and len(args.data) > 1:
        raise CliError(f"{args.command} takes a single --data directory")
    return args.data[0] if args.data else None


def write_run_metadata(args, name: str):
    config = {k: (str(v) if isinstance(v, Path) else [str(x) for x in v] if isinstance(v, list)
                  and v and isinstance(v[0], Path) else v)
              for k, v in sorted(vars(args).items()) if k != "verbose"}
    doc = {
        "command": args.command,
        "config": config,
        "versions": {"graphfeat": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
    }
    write_json(args.out / f"{name}_{args.command}_run.json", doc)


def summary_line(stats: dict) -> str:
    return (f"{stats['name']}: {stats['graphs']} graphs, {stats['classes']} classes; "
            f"nodes avg {stats['avg_nodes']:.2f} max {stats['max_nodes']} min {stats['min_nodes']}; "
            f"edges avg {stats['avg_edges']:.2f} max {stats['max_edges']} min {stats['min_edges']}")


def cmd_extract(args):
    data = _single_data(args)
    if data is None:
        raise CliError("extract needs --data")
    fm, stats = load_features(args, data)
    write_json(args.out / f"{fm.name}_stats.json", stats)
    print(summary_line(stats))
    print(f"wrote {args.out / (fm.name + '_features.csv')} ({len(fm)} rows)")
    return fm.name


def run_cv(args, fm: FeatureMatrix, classifiers) -> dict:
    folds = stratified_folds(fm.labels, args.folds, args.seed)
    results = [cross_validate(fm, classifier_config(c, args), folds, scale=not args.no_scale).to_dict()
               for c in classifiers]
    return {"dataset": fm.name, "seed": args.seed, "folds": args.folds,
            "scaled": not args.no_scale, "results": results}


def cmd_cv(args):
    fm, _ = load_features(args, _single_data(args))
    chosen = CLASSIFIERS if args.classifier == "all" else (args.classifier,)
    doc = run_cv(args, fm, chosen)
    write_json(args.out / f"{fm.name}_cv.json", doc)
    text = f"{fm.name}: {args.folds}-fold cross-validation, seed {args.seed}\n" + cv_table(doc["results"])
    (args.out / f"{fm.name}_cv.txt").write_text(text + "\n")
    print(text)
    return fm.name


def cmd_pca(args):
    fm, _ = load_features(args, _single_data(args))
    X = fm.X if args.no_scale else standardize_fit(fm.X).apply(fm.X)
    emb = pca2(X)
    path = args.out / f"{fm.name}_pca.csv"
    with path.open("w") as fh:
        fh.write("graph_id,label,pc1,pc2\n")
        for gid, lab, (a, b) in zip(fm.graph_ids.tolist(), fm.original_labels, emb.coordinates.tolist()):
            fh.write(f"{gid},{lab},{a:.12g},{b:.12g}\n")
    write_json(args.out / f"{fm.name}_pca.json", {
        "dataset": fm.name, "feature_names": list(fm.feature_names), "scaled": not args.no_scale,
        "components": emb.component_vectors.tolist(),
        "explained_variance": emb.explained_variance.tolist(),
    })
    print(f"{fm.name}: PC1 variance {emb.explained_variance[0]:.4f}, "
          f"PC2 variance {emb.explained_variance[1]:.4f}; wrote {path} ({len(fm)} rows)")
    return fm.name


def cmd_importance(args):
    fm, _ = load_features(args, _single_data(args))
    forest = rf_train(fm.X, fm.labels, classifier_config("rf", args))
    imp = rf_feature_importance(forest)
    write_json(args.out / f"{fm.name}_importance.json", {
        "dataset": fm.name, "seed": args.seed,
        "importance": dict(zip(fm.feature_names, imp.tolist())), "sum": float(imp.sum()),
    })
    print(f"{fm.name}: random-forest feature importance (sum {imp.sum():.12f})")
    print(importance_table(fm.feature_names, imp))
    return fm.name


def cmd_subsets(args):
    fm, _ = load_features(args, _single_data(args))
    sizes = sorted(set(args.sizes)) if args.sizes else list(range(1, fm.X.shape[1] + 1))
    folds = stratified_folds(fm.labels, args.folds, args.seed)
    found = subset_search(fm, classifier_config("rf", args), folds, sizes, jobs=args.jobs)
    per_k = {}
    for k, res in found.items():
        print(f"k={k}: {res.count} evaluations, best {res.best.mean_accuracy:.2f}%")
        per_k[k] = {
            "count": res.count,
            "best": res.best.to_dict(),
            "best_features": [fm.feature_names[c] for c in res.best.mask],
            "evaluations": [{"mask": list(r.mask), "mean_accuracy": r.mean_accuracy}
                            for r in res.evaluated],
        }
    write_json(args.out / f"{fm.name}_subsets.json",
               {"dataset": fm.name, "seed": args.seed, "per_k": {str(k): v for k, v in per_k.items()}})
    print(subsets_table(per_k))
    return fm.name


def consistency(reproduced: dict) -> dict | None:
    """ANOVA across classifiers and pairwise Pearson over per-dataset accuracies."""
    names = list(reproduced)
    if len(names) < 2:
        return None
    acc = {c: [reproduced[d][c] for d in names] for c in CLASSIFIERS}
    out = {"datasets": names}
    try:
        a = anova_oneway([acc[c] for c in CLASSIFIERS])
        out["anova"] = {"F": a.F, "p_value": a.p_value, "df_between": a.df_between,
                        "df_within": a.df_within}
    except ValueError as exc:
        out["anova"] = {"error": str(exc)}
    out["pearson"] = {}
    for i, a_ in enumerate(CLASSIFIERS):
        for b_ in CLASSIFIERS[i + 1:]:
            try:
                out["pearson"][f"{a_}-{b_}"] = pearson(acc[a_], acc[b_])
            except ValueError as exc:
                out["pearson"][f"{a_}-{b_}"] = str(exc)
    return out


def cmd_report(args):
    if not args.data and args.features is None:
        raise CliError("report needs at least one --data directory")
    reproduced = {}
    cv_docs = []
    for data in (args.data or [None]):
        sub_args = argparse.Namespace(**{**vars(args), "name": args.name if data is None else None})
        fm, _ = load_features(sub_args, data)
        doc = run_cv(args, fm, CLASSIFIERS)
        cv_docs.append(doc)
        reproduced[fm.name] = {r["classifier"]: r["mean_accuracy"] for r in doc["results"]}
    analysis = consistency(reproduced)
    write_json(args.out / "report.json", {"cv": cv_docs, "consistency": analysis})
    text = comparison_table(reproduced)
    if analysis:
        a = analysis["anova"]
        if "p_value" in a:
            text += f"\n\nANOVA across classifiers: F = {a['F']:.4f}, p = {a['p_value']:.7f}"
        for pair, r in analysis["pearson"].items():
            text += f"\nPearson {pair}: {r:.4f}" if isinstance(r, float) else f"\nPearson {pair}: {r}"
    (args.out / "report.txt").write_text(text + "\n")
    print(text)
    return "report"


def cmd_train(args):
    fm, _ = load_features(args, _single_data(args))
    cfg = classifier_config(args.classifier, args)
    X = fm.X
    scaler = None
    if args.classifier != "rf" and not args.no_scale:
        scaler = standardize_fit(X)
        X = scaler.apply(X)
    est = make_classifier(cfg).fit(X, fm.labels)
    model = {"knn": lambda: est, "svm": lambda: est.model_, "rf": lambda: est.forest_}[args.classifier]()
    path = args.model or args.out / f"{fm.name}_{args.classifier}.json"
    dump_model(model, path, scaler)
    print(f"wrote {model_kind(model)} model to {path}")
    return fm.name


def cmd_predict(args):
    fm, _ = load_features(args, _single_data(args), write=False)
    model, scaler = load_model(args.model)
    X = fm.X if scaler is None else scaler.apply(fm.X)
    pred = np.asarray(model.predict(X)).reshape(-1)
    path = args.out / f"{fm.name}_predictions.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        fh.write("graph_id,predicted_class\n")
        for gid, p in zip(fm.graph_ids.tolist(), pred.tolist()):
            fh.write(f"{gid},{p}\n")
    print(f"wrote {len(pred)} predictions to {path}")
    return fm.name


COMMANDS = {
    "extract": cmd_extract, "cv": cmd_cv, "pca": cmd_pca, "importance": cmd_importance,
    "subsets": cmd_subsets, "report": cmd_report, "train": cmd_train, "predict": cmd_predict,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.jobs is None:
            args.jobs = default_jobs()
        args.out.mkdir(parents=True, exist_ok=True)
        name = COMMANDS[args.command](args)
        write_run_metadata(args, name)
    except Exception as exc:  # every failure becomes a message and a nonzero exit
        if args.verbose:
            logger.exception("command failed")
        print(f"graphfeat {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
