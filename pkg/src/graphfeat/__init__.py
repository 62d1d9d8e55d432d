"""Graph classification from nine structural features."""

__version__ = "0.1.0"

from .features import FEATURE_NAMES, FeatureMatrix, FeatureVector, extract_all, extract_features
from .graph import Dataset, Graph, parse_tudataset

__all__ = [
    "FEATURE_NAMES", "FeatureMatrix", "FeatureVector", "extract_all", "extract_features",
    "Dataset", "Graph", "parse_tudataset", "__version__",
]
