from .cv import (CVResult, FoldAssignment, SubsetSearchResult, cross_validate, stratified_folds,
                 subset_search)
from .pca import Embedding2D, pca2
from .stats import AnovaResult, anova_oneway, betainc, f_sf, pearson

__all__ = [
    "CVResult", "FoldAssignment", "SubsetSearchResult", "cross_validate", "stratified_folds",
    "subset_search", "Embedding2D", "pca2", "AnovaResult", "anova_oneway", "betainc", "f_sf",
    "pearson",
]
