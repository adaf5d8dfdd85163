"""Feed-forward network: [affine -> batch-norm -> relu -> dropout] x 4 -> affine -> sigmoid.

Plain numpy with hand-written backprop and Adam. Inference always uses the
batch-norm running statistics and no dropout, so predictions are a
deterministic function of the input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..dataset import Dataset, FeatureSchema, sigmoid
from ..errors import ConfigError, DataError, NumericError

BN_EPS = 1e-5
BN_MOMENTUM = 0.1


def _inverse_scale(scale: np.ndarray) -> np.ndarray:
    # columns constant in training are switched off rather than passed through
    safe = np.where(scale > 0, scale, 1.0)
    return np.where(scale > 0, 1.0 / safe, 0.0)


def init_params(n_in: int, widths, rng: np.random.Generator, prior_logit: float = 0.0) -> dict:
    params = {}
    fan_in = n_in
    for i, w in enumerate(widths):
        params[f"W{i}"] = rng.normal(0.0, math.sqrt(2.0 / fan_in), size=(fan_in, w))
        params[f"b{i}"] = np.zeros(w)
        params[f"gamma{i}"] = np.ones(w)
        params[f"beta{i}"] = np.zeros(w)
        fan_in = w
    # small output layer so an untrained net predicts close to the class prior
    params["Wout"] = rng.normal(0.0, 0.01, size=(fan_in, 1))
    params["bout"] = np.array([prior_logit])
    return params


def forward(params: dict, stats: dict, Z: np.ndarray, n_layers: int, *, train: bool,
            dropout: float = 0.0, rng: np.random.Generator | None = None):
    """Return ``(logits, cache, batch_stats)``.

    In training mode batch statistics are used and returned so the caller can
    update running averages; in inference mode ``stats`` supplies them.
    """
    cache = []
    batch_stats = []
    h = Z
    for i in range(n_layers):
        a = h @ params[f"W{i}"] + params[f"b{i}"]
        if train:
            mu = a.mean(axis=0)
            var = a.var(axis=0)
            batch_stats.append((mu, var))
        else:
            mu, var = stats[f"mean{i}"], stats[f"var{i}"]
        inv = 1.0 / np.sqrt(var + BN_EPS)
        xhat = (a - mu) * inv
        bn = params[f"gamma{i}"] * xhat + params[f"beta{i}"]
        r = np.maximum(bn, 0.0)
        if train and dropout > 0.0:
            mask = (rng.random(r.shape) >= dropout) / (1.0 - dropout)
        else:
            mask = None
        out = r * mask if mask is not None else r
        cache.append((h, xhat, inv, bn, mask))
        h = out
    logits = (h @ params["Wout"] + params["bout"]).ravel()
    cache.append(h)
    return logits, cache, batch_stats


def backward(params: dict, cache, dlogits: np.ndarray, n_layers: int, *, train: bool) -> dict:
    """Gradients of a scalar loss given ``dloss/dlogits``.

    ``train`` must match the mode of the forward pass: with batch statistics
    the normalisation couples rows in the batch, with running statistics it is
    a fixed affine map.
    """
    grads = {}
    h_last = cache[-1]
    d = dlogits.reshape(-1, 1)
    grads["Wout"] = h_last.T @ d
    grads["bout"] = d.sum(axis=0)
    dh = d @ params["Wout"].T
    for i in reversed(range(n_layers)):
        h_in, xhat, inv, bn, mask = cache[i]
        dr = dh * mask if mask is not None else dh
        dbn = dr * (bn > 0)
        grads[f"gamma{i}"] = (dbn * xhat).sum(axis=0)
        grads[f"beta{i}"] = dbn.sum(axis=0)
        dxhat = dbn * params[f"gamma{i}"]
        if train:
            m = dxhat.shape[0]
            da = inv / m * (m * dxhat - dxhat.sum(axis=0) - xhat * (dxhat * xhat).sum(axis=0))
        else:
            da = dxhat * inv
        grads[f"W{i}"] = h_in.T @ da
        grads[f"b{i}"] = da.sum(axis=0)
        dh = da @ params[f"W{i}"].T
    return grads


def bce_with_logits(logits: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy and its gradient w.r.t. the logits."""
    loss = float(np.mean(np.logaddexp(0.0, logits) - y * logits))
    return loss, (sigmoid(logits) - y) / y.shape[0]


@dataclass(frozen=True, eq=False)
class MlpModel:
    schema: FeatureSchema
    widths: tuple[int, ...]
    params: dict
    stats: dict
    mean: np.ndarray
    scale: np.ndarray
    dropout: float
    seed: int
    loss_curve: tuple[float, ...] = ()
    kind: str = field(default="mlp", init=False)

    def __post_init__(self):
        for store in (self.params, self.stats):
            for k, v in store.items():
                arr = np.array(v, dtype=np.float64)
                arr.setflags(write=False)
                store[k] = arr
        for name in ("mean", "scale"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def standardize(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) * _inverse_scale(self.scale)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        logits, _, _ = forward(self.params, self.stats, self.standardize(X), len(self.widths), train=False)
        return logits

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.decision_function(X))

    def to_dict(self) -> dict:
        return {
            "widths": list(self.widths),
            "params": {k: v.tolist() for k, v in self.params.items()},
            "stats": {k: v.tolist() for k, v in self.stats.items()},
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "dropout": self.dropout,
            "seed": self.seed,
            "loss_curve": list(self.loss_curve),
        }

    @classmethod
    def from_dict(cls, schema: FeatureSchema, d: dict) -> "MlpModel":
        return cls(schema, tuple(d["widths"]), {k: np.array(v) for k, v in d["params"].items()},
                   {k: np.array(v) for k, v in d["stats"].items()}, np.array(d["mean"]),
                   np.array(d["scale"]), d["dropout"], d["seed"], tuple(d.get("loss_curve", ())))


def train_mlp(train: Dataset, layer_widths=(128, 64, 32, 16), dropout_rate: float = 0.2,
              epochs: int = 20, batch_size: int = 256, learning_rate: float = 1e-3,
              beta1: float = 0.9, beta2: float = 0.999, adam_eps: float = 1e-8,
              seed: int = 0) -> MlpModel:
    """Minibatch Adam on binary cross-entropy.

    A trailing minibatch with fewer than 2 rows is skipped because batch
    statistics are undefined for it.
    """
    widths = tuple(int(w) for w in layer_widths)
    if len(widths) != 4 or min(widths) < 1:
        raise ConfigError("layer_widths must be 4 positive integers")
    if not 0.0 <= dropout_rate < 1.0:
        raise ConfigError("dropout_rate must be in [0, 1)")
    if epochs < 0 or batch_size < 2:
        raise ConfigError("epochs must be >= 0 and batch_size >= 2")
    if train.n_rows == 0 or np.unique(train.y).size < 2:
        raise DataError("single class in training data")

    rng = np.random.default_rng(seed)
    mean, scale = train.X.mean(axis=0), train.X.std(axis=0)
    Z = (train.X - mean) * _inverse_scale(scale)
    y = train.y.astype(np.float64)
    prior = y.mean()
    params = init_params(Z.shape[1], widths, rng, math.log(prior / (1 - prior)))
    stats = {}
    for i, w in enumerate(widths):
        stats[f"mean{i}"] = np.zeros(w)
        stats[f"var{i}"] = np.ones(w)
    m1 = {k: np.zeros_like(v) for k, v in params.items()}
    m2 = {k: np.zeros_like(v) for k, v in params.items()}
    step = 0
    curve = []
    n = Z.shape[0]
    L = len(widths)
    for epoch in range(epochs):
        order = rng.permutation(n)
        total, seen = 0.0, 0
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            if batch.size < 2:
                continue
            logits, cache, bstats = forward(params, stats, Z[batch], L, train=True,
                                            dropout=dropout_rate, rng=rng)
            loss, dlogits = bce_with_logits(logits, y[batch])
            if not math.isfinite(loss):
                raise NumericError(f"training loss diverged at epoch {epoch}")
            grads = backward(params, cache, dlogits, L, train=True)
            step += 1
            for k in params:
                g = grads[k]
                m1[k] = beta1 * m1[k] + (1 - beta1) * g
                m2[k] = beta2 * m2[k] + (1 - beta2) * g * g
                mhat = m1[k] / (1 - beta1 ** step)
                vhat = m2[k] / (1 - beta2 ** step)
                params[k] = params[k] - learning_rate * mhat / (np.sqrt(vhat) + adam_eps)
            for i, (mu, var) in enumerate(bstats):
                stats[f"mean{i}"] = (1 - BN_MOMENTUM) * stats[f"mean{i}"] + BN_MOMENTUM * mu
                stats[f"var{i}"] = (1 - BN_MOMENTUM) * stats[f"var{i}"] + BN_MOMENTUM * var
            total += loss * batch.size
            seen += batch.size
        curve.append(total / max(seen, 1))
    return MlpModel(train.schema, widths, params, stats, mean, scale, dropout_rate, seed, tuple(curve))
