"""Global importance rankings: impurity, permutation, logit coefficients, summed |attribution|."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..dataset import Dataset
from ..errors import ConfigError, DataError
from ..models import LogisticModel, predict_label, predict_proba
from .base import Attribution, ImportanceRanking


def impurity_importance(model) -> ImportanceRanking:
    """Mean decrease in impurity, averaged over trees and normalised to sum 1.

    Each tree's contribution is normalised before averaging. Boosting stages
    use residual variance as their impurity.
    """
    trees = getattr(model, "trees", None)
    if not trees:
        raise TypeError("impurity importance requires trees")
    m = model.schema.n_features
    acc = np.zeros(m)
    for t in trees:
        dec = t.impurity_decrease(m)
        total = dec.sum()
        if total > 0:
            acc += dec / total
    acc /= len(trees)
    if acc.sum() > 0:
        acc = acc / acc.sum()
    return ImportanceRanking.from_scores(model.schema.names, acc, "impurity", model.kind)


def permutation_importance(model, ds: Dataset, repeats: int = 5, seed: int = 0) -> ImportanceRanking:
    """Mean decrease in accuracy when one player is shuffled across rows.

    One-hot groups are shuffled as whole row blocks so rows stay one-hot.
    Raw (possibly negative) drops are kept in ``ranking.raw``; the ranked
    scores are floored at 0.
    """
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    if ds.n_rows == 0:
        raise DataError("empty dataset")
    base_acc = float((predict_label(predict_proba(model, ds.X)) == ds.y).mean())
    players = ds.schema.players
    raw = np.zeros(len(players))
    for j, (_, cols) in enumerate(players):
        drops = []
        for r in range(repeats):
            rng = np.random.default_rng([seed, j, r])
            Xp = ds.X.copy()
            Xp[:, cols] = ds.X[rng.permutation(ds.n_rows)][:, cols]
            acc = float((predict_label(predict_proba(model, Xp)) == ds.y).mean())
            drops.append(base_acc - acc)
        raw[j] = float(np.mean(drops))
    names = [n for n, _ in players]
    return ImportanceRanking.from_scores(names, np.maximum(raw, 0.0), "permutation", model.kind,
                                         raw=dict(zip(names, raw.tolist())))


def logit_coefficient_importance(model) -> ImportanceRanking:
    """``|standardized weight|`` per column, one entry per one-hot level."""
    if not isinstance(model, LogisticModel):
        raise TypeError("coefficient importance requires a logistic model")
    return ImportanceRanking.from_scores(model.schema.names, np.abs(model.weights),
                                         "logit_coefficient", model.kind)


def global_importance_from_attributions(attributions: Sequence[Attribution],
                                        technique: str | None = None,
                                        model_kind: str = "") -> ImportanceRanking:
    """``score_j = sum_i |phi_ij|`` over the given attributions."""
    if not attributions:
        raise DataError("need at least one attribution")
    names = attributions[0].names
    for a in attributions:
        if a.names != names:
            raise DataError("attributions span different feature spaces")
    score = np.sum([np.abs(a.values) for a in attributions], axis=0)
    tech = technique or f"sum_abs_{attributions[0].technique}"
    return ImportanceRanking.from_scores(list(names), score, tech, model_kind)
