from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..dataset import Dataset, FeatureSchema, sigmoid
from ..errors import ConfigError, DataError, NumericError


@dataclass(frozen=True, eq=False)
class LogisticModel:
    """``P(good | x) = sigmoid(weights . z + intercept)`` with ``z = (x - mean) / scale``.

    ``weights`` are therefore standardized coefficients; ``raw_coefficients``
    maps them back to the raw feature scale.
    """

    schema: FeatureSchema
    weights: np.ndarray
    intercept: float
    mean: np.ndarray
    scale: np.ndarray
    l2: float = 0.0
    n_iter: int = 0
    converged: bool = True
    grad_norm: float = 0.0
    kind: str = field(default="logistic", init=False)

    def __post_init__(self):
        for name in ("weights", "mean", "scale"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def raw_coefficients(self) -> np.ndarray:
        return self.weights / self.scale

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        Z = (np.asarray(X, dtype=np.float64) - self.mean) / self.scale
        return Z @ self.weights + self.intercept

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.decision_function(X))

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "intercept": self.intercept,
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "l2": self.l2,
            "n_iter": self.n_iter,
            "converged": self.converged,
            "grad_norm": self.grad_norm,
        }

    @classmethod
    def from_dict(cls, schema: FeatureSchema, d: dict) -> "LogisticModel":
        return cls(schema, np.array(d["weights"]), d["intercept"], np.array(d["mean"]),
                   np.array(d["scale"]), d["l2"], d["n_iter"], d["converged"], d["grad_norm"])


def standardizer(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    return mean, scale


def _objective(Z, y, beta, l2):
    s = Z @ beta
    nll = np.mean(np.logaddexp(0.0, s) - y * s)
    return nll + 0.5 * l2 * float(beta[:-1] @ beta[:-1])


def train_logistic(train: Dataset, l2: float = 1e-4, max_iters: int = 100, tol: float = 1e-7,
                   seed: int = 0, max_weight_norm: float = 1e3) -> LogisticModel:
    """Damped Newton minimisation of the L2-penalised mean negative log-likelihood.

    The penalty ``l2 / 2 * ||w||^2`` applies to standardized weights, never to
    the intercept. Newton steps are solved by least squares so the collinear
    one-hot blocks do not break the solve when ``l2 == 0``. ``seed`` is unused
    (the fit is deterministic) and kept for a uniform trainer signature.
    """
    if l2 < 0:
        raise ConfigError("l2 must be >= 0")
    if train.n_rows == 0 or np.unique(train.y).size < 2:
        raise DataError("single class in training data")
    X = train.X
    y = train.y.astype(np.float64)
    n, m = X.shape
    mean, scale = standardizer(X)
    Z = np.hstack([(X - mean) / scale, np.ones((n, 1))])
    beta = np.zeros(m + 1)
    prior = y.mean()
    beta[-1] = np.log(prior / (1 - prior))
    penalty = np.full(m + 1, l2)
    penalty[-1] = 0.0

    obj = _objective(Z, y, beta, l2)
    converged = False
    gnorm = np.inf
    it = 0
    for it in range(1, max_iters + 1):
        p = sigmoid(Z @ beta)
        grad = Z.T @ (p - y) / n + penalty * beta
        gnorm = float(np.linalg.norm(grad))
        if gnorm < tol:
            converged = True
            it -= 1
            break
        H = (Z * (p * (1 - p))[:, None]).T @ Z / n + np.diag(penalty)
        step = np.linalg.lstsq(H, grad, rcond=None)[0]
        t = 1.0
        while True:
            cand = beta - t * step
            cand_obj = _objective(Z, y, cand, l2)
            if cand_obj <= obj or t < 1e-10:
                break
            t *= 0.5
        if not np.isfinite(cand_obj):
            raise NumericError(f"non-finite objective at iteration {it}")
        beta, obj = cand, cand_obj
        wnorm = float(np.linalg.norm(beta[:-1]))
        if wnorm > max_weight_norm:
            warnings.warn(f"weight norm {wnorm:.3g} exceeds {max_weight_norm:g}; data look "
                          "perfectly separable, capping", RuntimeWarning, stacklevel=2)
            beta[:-1] *= max_weight_norm / wnorm
            break
    else:
        p = sigmoid(Z @ beta)
        gnorm = float(np.linalg.norm(Z.T @ (p - y) / n + penalty * beta))
        converged = gnorm < tol
    return LogisticModel(train.schema, beta[:-1].copy(), float(beta[-1]), mean, scale, l2,
                         it, converged, gnorm)
