"""Static feature-importance techniques."""
from .base import Attribution, ImportanceRanking, TrainStats
from .gam import GamCluster, GamResult, gam_by_label, gam_cluster, gam_label_result
from .importance import (
    global_importance_from_attributions,
    impurity_importance,
    logit_coefficient_importance,
    permutation_importance,
)
from .lime import lime_explain
from .shapley import EXACT, exact_shapley, explain_many, kernel_shap

__all__ = [
    "Attribution", "ImportanceRanking", "TrainStats", "GamCluster", "GamResult",
    "gam_by_label", "gam_cluster", "gam_label_result", "global_importance_from_attributions",
    "impurity_importance", "logit_coefficient_importance", "permutation_importance",
    "lime_explain", "EXACT", "exact_shapley", "explain_many", "kernel_shap",
]
