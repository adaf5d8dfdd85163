from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError, DataError
from ..models import predict_proba
from .base import Attribution, TrainStats, check_width


def default_kernel_width(n_features: int) -> float:
    return 0.75 * math.sqrt(n_features)


def sample_neighbourhood(schema, x: np.ndarray, stats: TrainStats, n_samples: int,
                         rng: np.random.Generator) -> np.ndarray:
    """``n_samples`` rows around ``x``; row 0 is ``x`` itself.

    Continuous columns get Gaussian noise with the training stddev; each
    one-hot group draws a fresh level from the training level frequencies.
    """
    m = schema.n_features
    S = np.tile(x, (n_samples, 1))
    cont = schema.continuous_indices
    if cont:
        S[1:, cont] += rng.normal(size=(n_samples - 1, len(cont))) * stats.std[cont]
    for group, cols in schema.groups.items():
        freqs = np.asarray(stats.level_freqs[group], dtype=np.float64)
        picks = rng.choice(len(cols), size=n_samples - 1, p=freqs / freqs.sum())
        block = np.zeros((n_samples - 1, len(cols)))
        block[np.arange(n_samples - 1), picks] = 1.0
        S[1:, cols] = block
    assert S.shape[1] == m
    return S


def lime_explain(model, instance, train_stats: TrainStats, n_samples: int = 2000,
                 kernel_width: float | None = None, ridge: float = 1e-3, seed: int = 0,
                 instance_id: int = 0) -> Attribution:
    """Local weighted ridge surrogate around one instance.

    Features are standardized with the training mean/stddev; sample weights are
    ``exp(-d**2 / kernel_width**2)`` where ``d`` is the standardized Euclidean
    distance to the instance. The intercept is not penalised. Returns the
    surrogate slopes (per standardized column) with the kernel-weighted mean
    prediction as ``base_value``.
    """
    schema = model.schema
    x = np.asarray(instance, dtype=np.float64).reshape(-1)
    check_width(schema, x)
    m = schema.n_features
    if n_samples < m + 2:
        raise ConfigError(f"n_samples must be >= n_features + 2 = {m + 2}")
    if not ridge > 0:
        raise ConfigError("ridge must be > 0")
    kw = default_kernel_width(m) if kernel_width is None else float(kernel_width)
    if not kw > 0:
        raise ConfigError("kernel_width must be > 0")

    rng = np.random.default_rng([seed, int(instance_id)])
    S = sample_neighbourhood(schema, x, train_stats, n_samples, rng)
    f = predict_proba(model, S)
    Z = (S - train_stats.mean) / train_stats.std
    d2 = ((Z - Z[0]) ** 2).sum(axis=1)
    w = np.exp(-d2 / kw ** 2)
    wsum = w.sum()
    z_bar = w @ Z / wsum
    f_bar = float(w @ f / wsum)
    Zc = Z - z_bar
    fc = f - f_bar
    A = (Zc * w[:, None]).T @ Zc + ridge * np.eye(m)
    b = (Zc * w[:, None]).T @ fc
    try:
        coef = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise DataError(f"singular LIME normal equations: {exc}") from exc
    return Attribution(instance_id, schema.names, coef, f_bar, "lime", float(f[0]))
