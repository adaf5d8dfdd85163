"""Shapley attributions with an interventional value function.

``v(S)`` is the mean model output over background rows whose player columns
outside ``S`` keep their background values and whose columns in ``S`` take the
instance's values. A one-hot group is a single player, so every evaluated
row stays exactly one-hot. Group values are reported on the instance's active
level column (other level columns get 0); continuous players map to their
own column.
"""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from ..dataset import Dataset, FeatureSchema
from ..errors import ConfigError, DataError
from ..models import predict_proba
from .base import Attribution, check_width

MAX_EXACT_PLAYERS = 12
_CHUNK_ROWS = 200_000

EXACT = "exact"


def _background_matrix(background) -> np.ndarray:
    X = background.X if isinstance(background, Dataset) else np.asarray(background, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError("background must be a nonempty 2-D set of rows")
    return X


def coalition_values(model, instance: np.ndarray, background: np.ndarray,
                     players: list[list[int]], masks: np.ndarray) -> np.ndarray:
    """``v(S)`` for each boolean row of ``masks`` (n_coalitions x n_players)."""
    n_bg, m = background.shape
    col_masks = np.zeros((masks.shape[0], m), dtype=bool)
    for j, cols in enumerate(players):
        col_masks[:, cols] = masks[:, [j]]
    out = np.empty(masks.shape[0])
    per_chunk = max(1, _CHUNK_ROWS // n_bg)
    for start in range(0, masks.shape[0], per_chunk):
        cm = col_masks[start:start + per_chunk]
        rows = np.where(cm[:, None, :], instance[None, None, :], background[None, :, :])
        preds = predict_proba(model, rows.reshape(-1, m)).reshape(cm.shape[0], n_bg)
        out[start:start + per_chunk] = preds.mean(axis=1)
    return out


def _to_columns(schema: FeatureSchema, players: list[tuple[str, list[int]]],
                phi: np.ndarray, instance: np.ndarray) -> np.ndarray:
    vals = np.zeros(schema.n_features)
    for (_, cols), v in zip(players, phi):
        if len(cols) == 1:
            vals[cols[0]] = v
        else:
            active = [c for c in cols if instance[c] == 1.0]
            vals[active[0] if active else cols[0]] = v
    return vals


def _all_masks(M: int) -> np.ndarray:
    ints = np.arange(2 ** M, dtype=np.int64)
    return ((ints[:, None] >> np.arange(M)) & 1).astype(bool)


def exact_shapley(model, instance, background, instance_id: int = 0,
                  return_players: bool = False):
    """Shapley values by full enumeration of the ``2**M`` coalitions (``M <= 12``).

    ``phi_j = sum_S |S|! (M - |S| - 1)! / M! * (v(S + j) - v(S))``, with
    ``base_value = v(empty)``.
    """
    schema = model.schema
    x = np.asarray(instance, dtype=np.float64).reshape(-1)
    check_width(schema, x)
    bg = _background_matrix(background)
    players = schema.players
    M = len(players)
    if M > MAX_EXACT_PLAYERS:
        raise ConfigError(f"{M} players is too many for exact enumeration; use kernel_shap")
    masks = _all_masks(M)
    v = coalition_values(model, x, bg, [c for _, c in players], masks)
    ints = np.arange(2 ** M)
    sizes = masks.sum(axis=1)
    fact = [math.factorial(k) for k in range(M + 1)]
    weight = np.array([fact[s] * fact[M - s - 1] / fact[M] if s < M else 0.0 for s in range(M + 1)])
    phi = np.zeros(M)
    for j in range(M):
        without = ints[~masks[:, j]]
        with_j = without | (1 << j)
        phi[j] = np.sum(weight[sizes[without]] * (v[with_j] - v[without]))
    fx = float(predict_proba(model, x)[0])
    attr = Attribution(instance_id, schema.names, _to_columns(schema, players, phi, x),
                       float(v[0]), "exact_shapley", fx)
    if return_players:
        return attr, dict(zip([n for n, _ in players], phi.tolist()))
    return attr


def shapley_kernel_weight(M: int, s: int) -> float:
    return (M - 1) / (math.comb(M, s) * s * (M - s))


def _solve_constrained(masks, weights, v, v_empty, fx):
    """Weighted least squares with ``sum(phi) == fx - v_empty`` eliminated via the last player."""
    M = masks.shape[1]
    Z = masks.astype(np.float64)
    delta = fx - v_empty
    target = v - v_empty - Z[:, -1] * delta
    A = Z[:, :-1] - Z[:, [-1]]
    sw = np.sqrt(weights)
    sol = np.linalg.lstsq(A * sw[:, None], target * sw, rcond=None)[0]
    phi = np.empty(M)
    phi[:-1] = sol
    phi[-1] = delta - sol.sum()
    return phi


def _sample_coalitions(M: int, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Paired sampling: size ~ Shapley kernel mass, then a uniform subset and its complement.

    Returns unique masks with multiplicity counts as regression weights.
    """
    sizes = np.arange(1, M)
    size_p = np.array([(M - 1) / (s * (M - s)) for s in sizes])
    size_p /= size_p.sum()
    n_pairs = (n + 1) // 2
    drawn = rng.choice(sizes, size=n_pairs, p=size_p)
    masks = np.zeros((2 * n_pairs, M), dtype=bool)
    for i, s in enumerate(drawn):
        members = rng.choice(M, size=s, replace=False)
        masks[2 * i, members] = True
        masks[2 * i + 1] = ~masks[2 * i]
    masks = masks[:n]
    uniq, counts = np.unique(masks, axis=0, return_counts=True)
    return uniq, counts.astype(np.float64)


def kernel_shap(model, instance, background, n_coalitions=EXACT, seed: int = 0,
                instance_id: int = 0, return_players: bool = False):
    """Kernel SHAP: Shapley-kernel weighted least squares over coalitions.

    ``n_coalitions="exact"`` enumerates all ``2**M - 2`` proper coalitions with
    their kernel weights, which reproduces exact Shapley values. An integer
    draws that many coalitions (paired sampling) from the kernel distribution.
    Efficiency is imposed as a hard constraint in both modes.
    """
    schema = model.schema
    x = np.asarray(instance, dtype=np.float64).reshape(-1)
    check_width(schema, x)
    bg = _background_matrix(background)
    players = schema.players
    M = len(players)
    cols = [c for _, c in players]
    fx = float(predict_proba(model, x)[0])
    v_empty = float(coalition_values(model, x, bg, cols, np.zeros((1, M), dtype=bool))[0])
    if M == 1:
        phi = np.array([fx - v_empty])
    else:
        if n_coalitions == EXACT:
            masks = np.array([[j in c for j in range(M)]
                              for s in range(1, M) for c in combinations(range(M), s)], dtype=bool)
            weights = np.array([shapley_kernel_weight(M, int(s)) for s in masks.sum(axis=1)])
        else:
            n = int(n_coalitions)
            if n < M + 1:
                raise ConfigError(f"need at least {M + 1} coalitions for {M} players, got {n}")
            rng = np.random.default_rng([seed, int(instance_id)])
            masks, weights = _sample_coalitions(M, n, rng)
        v = coalition_values(model, x, bg, cols, masks)
        phi = _solve_constrained(masks, weights, v, v_empty, fx)
    technique = "kernel_shap" if n_coalitions == EXACT else "kernel_shap_sampled"
    attr = Attribution(instance_id, schema.names, _to_columns(schema, players, phi, x),
                       v_empty, technique, fx)
    if return_players:
        return attr, dict(zip([n for n, _ in players], phi.tolist()))
    return attr


def explain_many(model, rows: Dataset, background, method: str = "kernel_shap",
                 n_coalitions=EXACT, seed: int = 0) -> list[Attribution]:
    """Attributions for every row of ``rows`` (instance ids taken from ``row_ids``)."""
    out = []
    for i in range(rows.n_rows):
        rid = int(rows.row_ids[i])
        if method == "exact_shapley":
            out.append(exact_shapley(model, rows.X[i], background, instance_id=rid))
        else:
            out.append(kernel_shap(model, rows.X[i], background, n_coalitions, seed, instance_id=rid))
    return out
