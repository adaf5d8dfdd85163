"""Audit static feature-importance rankings against what-if perturbation sensitivity."""
from ._backend import BACKEND
from .consistency import build_consistency_report, spearman_rank_correlation, top_k_overlap
from .dataset import (Dataset, FeatureSchema, SchemaConfig, SyntheticSpec, default_synthetic_spec,
                      generate_synthetic, load_csv)
from .errors import ConfigError, DataError, FiauditError, NumericError
from .models import TRAINERS, evaluate_accuracy, predict_proba
from .perturbation import PerturbationConfig, flip_categorical, run_perturbations, sweep_continuous

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "build_consistency_report", "spearman_rank_correlation", "top_k_overlap", "Dataset",
    "FeatureSchema", "SchemaConfig", "SyntheticSpec", "default_synthetic_spec", "generate_synthetic",
    "load_csv", "ConfigError", "DataError", "FiauditError", "NumericError", "TRAINERS",
    "evaluate_accuracy", "predict_proba", "PerturbationConfig", "flip_categorical",
    "run_perturbations", "sweep_continuous", "__version__",
]
