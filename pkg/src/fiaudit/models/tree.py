"""CART-style trees, random forests and gradient boosting on the shared split kernel."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .._backend import kernels
from ..dataset import Dataset, FeatureSchema, sigmoid
from ..errors import ConfigError, DataError, NumericError

MIN_GAIN = 1e-12


@dataclass(frozen=True, eq=False)
class Tree:
    """Flat array representation; node 0 is the root, leaves have ``feature == -1``.

    ``impurity`` is gini for classification trees and residual variance for
    boosting stages; ``n_samples`` counts bootstrap duplicates.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray
    impurity: np.ndarray

    def __post_init__(self):
        for name, dt in (("feature", np.int64), ("threshold", np.float64), ("left", np.int64),
                         ("right", np.int64), ("value", np.float64), ("n_samples", np.float64),
                         ("impurity", np.float64)):
            arr = np.ascontiguousarray(getattr(self, name), dtype=dt)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def predict(self, X: np.ndarray) -> np.ndarray:
        return kernels.predict_tree(X, self.feature, self.threshold, self.left, self.right, self.value)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return kernels.apply_tree(X, self.feature, self.threshold, self.left, self.right)

    def impurity_decrease(self, n_features: int) -> np.ndarray:
        """Per-feature sum of sample-weighted impurity decrease, relative to the root count."""
        out = np.zeros(n_features)
        root_n = self.n_samples[0]
        for t in np.flatnonzero(self.feature >= 0):
            l, r = self.left[t], self.right[t]
            dec = (self.n_samples[t] * self.impurity[t]
                   - self.n_samples[l] * self.impurity[l]
                   - self.n_samples[r] * self.impurity[r]) / root_n
            out[self.feature[t]] += dec
        return out

    def to_dict(self, node: int = 0) -> dict:
        d = {"id": node, "samples": float(self.n_samples[node]), "impurity": float(self.impurity[node])}
        if self.feature[node] < 0:
            d["value"] = float(self.value[node])
            return d
        d["feature"] = int(self.feature[node])
        d["threshold"] = float(self.threshold[node])
        d["left"] = self.to_dict(int(self.left[node]))
        d["right"] = self.to_dict(int(self.right[node]))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        # node ids keep the flat order, so sums over nodes match the fitted tree bit for bit
        nodes = {}

        def visit(node: dict) -> int:
            me = int(node["id"])
            rec = {"n_samples": node["samples"], "impurity": node["impurity"], "threshold": 0.0,
                   "value": 0.0, "feature": -1, "left": -1, "right": -1}
            if "value" in node:
                rec["value"] = node["value"]
            else:
                rec["feature"] = node["feature"]
                rec["threshold"] = node["threshold"]
                rec["left"] = visit(node["left"])
                rec["right"] = visit(node["right"])
            nodes[me] = rec
            return me

        visit(d)
        if sorted(nodes) != list(range(len(nodes))):
            raise DataError("tree node ids are not contiguous")
        order = [nodes[i] for i in range(len(nodes))]
        return cls(**{k: np.array([rec[k] for rec in order]) for k in order[0]})


def _gini(y: np.ndarray) -> float:
    p = y.mean()
    return 2.0 * p * (1.0 - p)


def grow_tree(X, target, rows, *, max_depth, min_samples_leaf, max_features, rng,
              leaf_value, node_impurity) -> Tree:
    """Greedy depth-first growth with exhaustive midpoint thresholds.

    Args:
        X: float64 C-contiguous matrix.
        target: split target; SSE reduction on it is maximised.
        rows: ascending row indices (duplicates allowed for bootstraps).
        max_depth: maximum number of splits on any root-to-leaf path (None = unlimited).
        max_features: candidate features per node; a fresh random subset is drawn at
            each node when smaller than the number of columns.
        rng: numpy Generator used only for feature subsets.
        leaf_value: ``rows -> float``.
        node_impurity: ``rows -> float``.
    """
    if max_depth is not None and max_depth < 1:
        raise ConfigError("max_depth must be >= 1")
    if min_samples_leaf < 1:
        raise ConfigError("min_samples_leaf must be >= 1")
    m = X.shape[1]
    k = m if max_features is None else max(1, min(int(max_features), m))
    all_features = np.arange(m, dtype=np.int64)
    feature, threshold, left, right, value, n_samples, impurity = ([] for _ in range(7))

    def new_node(r):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(leaf_value(r))
        n_samples.append(float(r.shape[0]))
        impurity.append(node_impurity(r))
        return len(feature) - 1

    root = new_node(rows)
    stack = [(root, rows, 0)]
    while stack:
        node, r, depth = stack.pop()
        if (max_depth is not None and depth >= max_depth) or impurity[node] <= 0.0:
            continue
        feats = all_features if k == m else np.sort(rng.choice(m, size=k, replace=False)).astype(np.int64)
        f, thr, gain = kernels.best_split(X, target, r, feats, min_samples_leaf)
        if f < 0 or not gain > MIN_GAIN:
            continue
        go_left = X[r, f] <= thr
        r_left, r_right = r[go_left], r[~go_left]
        feature[node] = int(f)
        threshold[node] = float(thr)
        left[node] = new_node(r_left)
        right[node] = new_node(r_right)
        # right pushed first so the left subtree is expanded first
        stack.append((right[node], r_right, depth + 1))
        stack.append((left[node], r_left, depth + 1))
    return Tree(np.array(feature), np.array(threshold), np.array(left), np.array(right),
                np.array(value), np.array(n_samples), np.array(impurity))


def fit_classification_tree(X, y, rows, *, max_depth, min_samples_leaf, max_features, rng) -> Tree:
    yf = y.astype(np.float64)
    return grow_tree(X, yf, rows, max_depth=max_depth, min_samples_leaf=min_samples_leaf,
                     max_features=max_features, rng=rng,
                     leaf_value=lambda r: float(yf[r].mean()),
                     node_impurity=lambda r: float(_gini(yf[r])))


def _check_trainable(train: Dataset):
    if train.n_rows == 0 or np.unique(train.y).size < 2:
        raise DataError("single class in training data")


@dataclass(frozen=True, eq=False)
class ForestModel:
    schema: FeatureSchema
    trees: tuple[Tree, ...]
    max_depth: int | None
    min_samples_leaf: int
    features_per_split: int
    seed: int
    kind: str = field(default="random_forest", init=False)

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def tree_probas(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        return np.stack([t.predict(X) for t in self.trees])

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        acc = np.zeros(X.shape[0])
        for t in self.trees:
            acc += t.predict(X)
        return acc / len(self.trees)

    def to_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "features_per_split": self.features_per_split,
            "seed": self.seed,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, schema: FeatureSchema, d: dict) -> "ForestModel":
        return cls(schema, tuple(Tree.from_dict(t) for t in d["trees"]), d["max_depth"],
                   d["min_samples_leaf"], d["features_per_split"], d["seed"])


def train_random_forest(train: Dataset, n_trees: int = 200, max_depth: int | None = 12,
                        min_samples_leaf: int = 1, features_per_split: int | None = None,
                        seed: int = 0) -> ForestModel:
    """Bagged gini trees with a random feature subset per split.

    Each tree draws its bootstrap and feature subsets from its own stream
    seeded by ``(seed, tree_index)``, so trees can be fitted in any order.
    ``features_per_split`` defaults to ``round(sqrt(n_features))``.
    """
    if n_trees < 1:
        raise ConfigError("n_trees must be >= 1")
    if max_depth is not None and max_depth < 1:
        raise ConfigError("max_depth must be >= 1")
    _check_trainable(train)
    X, y, n = train.X, train.y, train.n_rows
    m = train.schema.n_features
    k = features_per_split if features_per_split is not None else max(1, int(round(math.sqrt(m))))
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        rows = np.sort(rng.integers(0, n, size=n)).astype(np.int64)
        trees.append(fit_classification_tree(X, y, rows, max_depth=max_depth,
                                             min_samples_leaf=min_samples_leaf,
                                             max_features=k, rng=rng))
    return ForestModel(train.schema, tuple(trees), max_depth, min_samples_leaf, k, seed)


def log_loss(y: np.ndarray, score: np.ndarray) -> float:
    """Mean binary cross-entropy of labels against raw log-odds ``score``."""
    return float(np.mean(np.logaddexp(0.0, score) - y * score))


@dataclass(frozen=True, eq=False)
class BoostedModel:
    schema: FeatureSchema
    initial: float
    stages: tuple[Tree, ...]
    learning_rate: float
    max_depth: int
    seed: int
    train_loss: tuple[float, ...] = ()
    kind: str = field(default="gradient_boosting", init=False)

    @property
    def trees(self) -> tuple[Tree, ...]:
        return self.stages

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        acc = np.zeros(X.shape[0])
        for t in self.stages:
            acc += t.predict(X)
        return self.initial + self.learning_rate * acc

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.decision_function(X))

    def to_dict(self) -> dict:
        return {
            "initial": self.initial,
            "learning_rate": self.learning_rate,
            "max_depth": self.max_depth,
            "seed": self.seed,
            "train_loss": list(self.train_loss),
            "stages": [t.to_dict() for t in self.stages],
        }

    @classmethod
    def from_dict(cls, schema: FeatureSchema, d: dict) -> "BoostedModel":
        return cls(schema, d["initial"], tuple(Tree.from_dict(t) for t in d["stages"]),
                   d["learning_rate"], d["max_depth"], d["seed"], tuple(d.get("train_loss", ())))


def train_gradient_boosting(train: Dataset, n_stages: int = 200, learning_rate: float = 0.1,
                            max_depth: int = 3, seed: int = 0, min_samples_leaf: int = 1,
                            ridge: float = 1e-6) -> BoostedModel:
    """Log-loss gradient boosting.

    Each stage fits a least-squares regression tree to the pseudo-residuals
    ``y - p`` and replaces its leaf values by one Newton step,
    ``sum(y - p) / (sum(p * (1 - p)) + ridge)`` over the leaf's rows.
    """
    if n_stages < 1:
        raise ConfigError("n_stages must be >= 1")
    if not 0.0 < learning_rate <= 1.0:
        raise ConfigError("learning_rate must be in (0, 1]")
    _check_trainable(train)
    X, y, n = train.X, train.y.astype(np.float64), train.n_rows
    prior = y.mean()
    initial = float(math.log(prior / (1.0 - prior)))
    score = np.full(n, initial)
    rows = np.arange(n, dtype=np.int64)
    rng = np.random.default_rng(seed)
    losses = [log_loss(y, score)]
    stages = []
    for t in range(n_stages):
        p = sigmoid(score)
        resid = y - p
        hess = p * (1.0 - p)

        def newton(r, resid=resid, hess=hess):
            return float(resid[r].sum() / (hess[r].sum() + ridge))

        def variance(r, resid=resid):
            return float(resid[r].var())

        tree = grow_tree(X, resid, rows, max_depth=max_depth, min_samples_leaf=min_samples_leaf,
                         max_features=None, rng=rng, leaf_value=newton, node_impurity=variance)
        score = score + learning_rate * tree.predict(X)
        loss = log_loss(y, score)
        if not math.isfinite(loss):
            raise NumericError(f"non-finite training loss at stage {t}")
        losses.append(loss)
        stages.append(tree)
    return BoostedModel(train.schema, initial, tuple(stages), learning_rate, max_depth, seed, tuple(losses))
