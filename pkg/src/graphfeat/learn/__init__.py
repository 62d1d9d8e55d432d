from .forest import Forest, ForestConfig, RandomForest, Tree, rf_feature_importance, rf_predict, rf_train
from .knn import KNNClassifier, KnnConfig, knn_predict
from .persist import dump_model, load_model
from .svm import LinearSVM, SvmConfig, SvmModel, svm_predict, svm_train

__all__ = [
    "Forest", "ForestConfig", "RandomForest", "Tree", "rf_feature_importance", "rf_predict",
    "rf_train", "KNNClassifier", "KnnConfig", "knn_predict", "dump_model", "load_model",
    "LinearSVM", "SvmConfig", "SvmModel", "svm_predict", "svm_train", "make_classifier",
]


def make_classifier(config):
    """Fresh estimator (``fit``/``predict``) for a KnnConfig, SvmConfig or ForestConfig."""
    if isinstance(config, KnnConfig):
        return KNNClassifier(config.k)
    if isinstance(config, SvmConfig):
        return LinearSVM(config.C, config.tol, config.max_iter)
    if isinstance(config, ForestConfig):
        return RandomForest(config.trees, config.max_depth, config.seed, config.max_features)
    raise TypeError(f"unknown classifier config {config!r}")
