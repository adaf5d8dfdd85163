"""The four classifier families behind one ``predict_proba`` contract.

Every model object carries ``kind``, ``schema`` and ``predict_proba(X)``
returning ``P(good)`` for each row.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import Dataset, FeatureSchema
from ..errors import DataError, NumericError
from .logistic import LogisticModel, train_logistic
from .mlp import MlpModel, train_mlp
from .tree import BoostedModel, ForestModel, Tree, train_gradient_boosting, train_random_forest

MODEL_KINDS = ("logistic", "random_forest", "gradient_boosting", "mlp")
FORMAT_VERSION = 1
# pure forest leaves and saturated sigmoids would otherwise reach exactly 0 or 1
PROBA_EPS = 1e-12

_CLASSES = {
    "logistic": LogisticModel,
    "random_forest": ForestModel,
    "gradient_boosting": BoostedModel,
    "mlp": MlpModel,
}
TRAINERS = {
    "logistic": train_logistic,
    "random_forest": train_random_forest,
    "gradient_boosting": train_gradient_boosting,
    "mlp": train_mlp,
}

TrainedModel = LogisticModel | ForestModel | BoostedModel | MlpModel


def predict_proba(model, rows) -> np.ndarray:
    """``P(good)`` per row, clipped to ``[PROBA_EPS, 1 - PROBA_EPS]``.

    A 1-D input is treated as a single row.
    """
    X = np.asarray(rows, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.schema.n_features:
        raise DataError(f"row width {X.shape[1]} does not match schema width {model.schema.n_features}")
    p = model.predict_proba(np.ascontiguousarray(X))
    if not np.isfinite(p).all():
        raise NumericError(f"{model.kind} produced non-finite probabilities")
    return np.clip(p, PROBA_EPS, 1.0 - PROBA_EPS)


def predict_label(proba: np.ndarray) -> np.ndarray:
    # exact 0.5 goes to the positive class
    return (np.asarray(proba) >= 0.5).astype(np.int64)


@dataclass(frozen=True)
class AccuracyResult:
    accuracy: float
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def confusion(self) -> np.ndarray:
        """Rows = actual (bad, good), columns = predicted (bad, good)."""
        return np.array([[self.tn, self.fp], [self.fn, self.tp]])


def evaluate_accuracy(model, holdout: Dataset) -> AccuracyResult:
    if holdout.n_rows == 0:
        raise DataError("empty holdout")
    pred = predict_label(predict_proba(model, holdout.X))
    y = holdout.y
    tp = int(((pred == 1) & (y == 1)).sum())
    tn = int(((pred == 0) & (y == 0)).sum())
    fp = int(((pred == 1) & (y == 0)).sum())
    fn = int(((pred == 0) & (y == 1)).sum())
    return AccuracyResult((tp + tn) / holdout.n_rows, tp, fp, tn, fn)


def model_to_dict(model) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "schema": model.schema.to_dict(),
        "schema_hash": model.schema.schema_hash(),
        "model": model.to_dict(),
    }


def model_from_dict(doc: dict):
    if doc.get("format_version") != FORMAT_VERSION:
        raise DataError(f"unsupported model format version {doc.get('format_version')!r}")
    schema = FeatureSchema.from_dict(doc["schema"])
    if schema.schema_hash() != doc["schema_hash"]:
        raise DataError("schema hash mismatch in serialized model")
    try:
        cls = _CLASSES[doc["kind"]]
    except KeyError:
        raise DataError(f"unknown model kind {doc['kind']!r}") from None
    return cls.from_dict(schema, doc["model"])


__all__ = [
    "MODEL_KINDS", "TRAINERS", "TrainedModel", "LogisticModel", "ForestModel", "BoostedModel",
    "MlpModel", "Tree", "train_logistic", "train_random_forest", "train_gradient_boosting",
    "train_mlp", "predict_proba", "predict_label", "evaluate_accuracy", "AccuracyResult",
    "model_to_dict", "model_from_dict",
]
