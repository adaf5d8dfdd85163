import os

import numpy as np
import pytest

from fiaudit.dataset import (ContinuousSpec, GroupSpec, SyntheticSpec, balanced_sample,
                             default_synthetic_spec, generate_synthetic, train_holdout_split)
from fiaudit.models import mlp as mlp_mod
from fiaudit.models import train_gradient_boosting, train_logistic, train_mlp, train_random_forest

# filled by tests/test_acceptance.py, printed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_collection_modifyitems(config, items):
    if os.environ.get("FIAUDIT_LENDING_CLUB_CSV"):
        return
    skip = pytest.mark.skip(reason="set FIAUDIT_LENDING_CLUB_CSV to run the real-data track")
    for item in items:
        if "realdata" in item.keywords:
            item.add_marker(skip)


def three_feature_spec(weights=(3.0, 1.0, 0.0), n_rows=4000, intercept=None, noise=0.0, high=2.0):
    """f0, f1, f2 ~ U(0, high) with logistic ground truth on the raw values."""
    cont = tuple(ContinuousSpec(f"f{i}", "uniform", {"low": 0.0, "high": high}) for i in range(3))
    w = {f"f{i}": float(v) for i, v in enumerate(weights)}
    if intercept is None:
        intercept = -0.5 * high * sum(weights)
    return SyntheticSpec(n_rows, cont, (), w, intercept, noise)


def mixed_spec(n_rows=3000):
    """Three continuous columns plus a 3-level group; small enough for exact Shapley everywhere."""
    cont = (ContinuousSpec("a", "uniform", {"low": 0.0, "high": 2.0}),
            ContinuousSpec("b", "gamma", {"shape": 2.0, "scale": 1.0}),
            ContinuousSpec("c", "uniform", {"low": 1.0, "high": 3.0}))
    groups = (GroupSpec("g", ("x", "y", "z"), (0.4, 0.35, 0.25)),)
    w = {"a": 2.0, "b": -0.8, "c": 0.5, "g=x": 0.7, "g=z": -0.7}
    return SyntheticSpec(n_rows, cont, groups, w, -0.6, 0.02)


@pytest.fixture(scope="session")
def mixed_data():
    ds = generate_synthetic(mixed_spec(), seed=11)
    return train_holdout_split(ds, 0.25, seed=12)


@pytest.fixture(scope="session")
def small_models(mixed_data):
    train, _ = mixed_data
    return {
        "logistic": train_logistic(train),
        "random_forest": train_random_forest(train, n_trees=15, max_depth=6, seed=1),
        "gradient_boosting": train_gradient_boosting(train, n_stages=30, max_depth=2, seed=2),
        "mlp": train_mlp(train, layer_widths=(16, 12, 8, 4), epochs=4, seed=3),
    }


@pytest.fixture(scope="session")
def default_split():
    ds = generate_synthetic(default_synthetic_spec(6000), seed=5)
    ds = balanced_sample(ds, 4000, seed=6)
    return train_holdout_split(ds, 0.2, seed=7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


class FunctionModel:
    """Wrap a plain function of the design matrix as a model."""

    def __init__(self, schema, fn, kind="function"):
        self.schema = schema
        self.fn = fn
        self.kind = kind

    def predict_proba(self, X):
        return self.fn(np.asarray(X, dtype=np.float64))


def mlp_grad_check(train_mode, n_coords=50, seed=0):
    """Worst relative error between backprop and central differences on random coordinates."""
    rng = np.random.default_rng(seed)
    widths = (6, 5, 4, 3)
    params = mlp_mod.init_params(4, widths, rng)
    params["Wout"] = rng.normal(0, 0.5, size=params["Wout"].shape)
    for i in range(4):
        params[f"gamma{i}"] = rng.uniform(0.5, 1.5, size=widths[i])
        params[f"beta{i}"] = rng.normal(0, 0.3, size=widths[i])
    stats = {}
    for i, w in enumerate(widths):
        stats[f"mean{i}"] = rng.normal(0, 0.2, size=w)
        stats[f"var{i}"] = rng.uniform(0.5, 2.0, size=w)
    Z = rng.normal(size=(16, 4))
    y = (rng.random(16) < 0.5).astype(float)

    def loss(p):
        logits, _, _ = mlp_mod.forward(p, stats, Z, 4, train=train_mode)
        return mlp_mod.bce_with_logits(logits, y)[0]

    logits, cache, _ = mlp_mod.forward(params, stats, Z, 4, train=train_mode)
    _, dlog = mlp_mod.bce_with_logits(logits, y)
    grads = mlp_mod.backward(params, cache, dlog, 4, train=train_mode)
    keys = sorted(params)
    worst = 0.0
    checked = 0
    while checked < n_coords:
        k = keys[rng.integers(len(keys))]
        idx = tuple(rng.integers(s) for s in params[k].shape)
        h = 1e-5
        plus = {kk: v.copy() for kk, v in params.items()}
        minus = {kk: v.copy() for kk, v in params.items()}
        plus[k][idx] += h
        minus[k][idx] -= h
        num = (loss(plus) - loss(minus)) / (2 * h)
        ana = grads[k][idx]
        if abs(num) < 1e-7 and abs(ana) < 1e-7:
            continue  # dead relu coordinate; relative error undefined
        worst = max(worst, abs(num - ana) / max(abs(num), abs(ana)))
        checked += 1
    return worst
