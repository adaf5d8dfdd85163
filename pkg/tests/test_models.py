import json
import math
import warnings

import numpy as np
import pytest

from conftest import mlp_grad_check, three_feature_spec
from fiaudit.dataset import Dataset, FeatureSchema, generate_synthetic, sigmoid
from fiaudit.errors import ConfigError, DataError
from fiaudit.models import (BoostedModel, ForestModel, LogisticModel, Tree, evaluate_accuracy,
                            model_from_dict, model_to_dict, predict_label, predict_proba,
                            train_gradient_boosting, train_logistic, train_mlp, train_random_forest)
from fiaudit.models.tree import log_loss


def _threshold_data(n=41):
    x = np.linspace(0.0, 1.0, n)
    schema = FeatureSchema.from_columns(["x"])
    return Dataset(schema, x.reshape(-1, 1), (x > 0.5).astype(int), np.arange(n))


def _leaf(p):
    return Tree([-1], [0.0], [-1], [-1], [p], [1.0], [0.0])


def test_logistic_recovers_weights():
    spec = three_feature_spec((2.0, -1.0, 0.0), n_rows=10000, high=1.0)
    ds = generate_synthetic(spec, 1)
    m = train_logistic(ds, l2=0.0)
    w = m.raw_coefficients
    assert abs(w[0] - 2.0) / 2.0 < 0.1
    assert abs(w[1] + 1.0) / 1.0 < 0.1
    assert m.converged


def test_logistic_single_class():
    ds = _threshold_data()
    one = ds.subset(np.flatnonzero(ds.y == 1))
    with pytest.raises(DataError, match="single class"):
        train_logistic(one)
    with pytest.raises(ConfigError):
        train_logistic(ds, l2=-1.0)


def test_logistic_loss_below_null(mixed_data):
    train, _ = mixed_data
    m = train_logistic(train)
    y = train.y.astype(float)
    null = log_loss(y, np.full(y.size, math.log(y.mean() / (1 - y.mean()))))
    assert log_loss(y, m.decision_function(train.X)) < null
    zero = log_loss(y, np.zeros(y.size))
    assert log_loss(y, m.decision_function(train.X)) < zero


def test_logistic_separable_warns_and_caps():
    ds = _threshold_data()
    with pytest.warns(RuntimeWarning, match="separable"):
        m = train_logistic(ds, l2=0.0, max_weight_norm=50.0)
    assert np.linalg.norm(m.weights) <= 50.0 + 1e-9
    assert evaluate_accuracy(m, ds).accuracy == 1.0


def test_zero_logistic_is_half():
    s = FeatureSchema.from_columns(["a", "b"])
    m = LogisticModel(s, np.zeros(2), 0.0, np.zeros(2), np.ones(2))
    assert np.all(predict_proba(m, np.random.default_rng(0).normal(size=(5, 2))) == 0.5)
    assert predict_label(np.array([0.5, 0.4999])).tolist() == [1, 0]


def test_forest_of_constant_leaves():
    s = FeatureSchema.from_columns(["a"])
    f = ForestModel(s, (_leaf(0.7), _leaf(0.7), _leaf(0.7)), 1, 1, 1, 0)
    assert np.allclose(predict_proba(f, np.zeros((4, 1))), 0.7)


def test_single_stump_threshold():
    ds = _threshold_data()
    f = train_random_forest(ds, n_trees=1, max_depth=1, features_per_split=1, seed=0)
    t = f.trees[0]
    gap = 1.0 / 40
    assert t.feature[0] == 0 and abs(t.threshold[0] - 0.5) <= gap + 1e-12
    with pytest.raises(ConfigError):
        train_random_forest(ds, max_depth=0)
    with pytest.raises(ConfigError):
        train_random_forest(ds, n_trees=0)


def test_boosting_stump_matches_tree():
    ds = _threshold_data()
    b = train_gradient_boosting(ds, n_stages=1, learning_rate=1.0, max_depth=1)
    # full-data tree (no bootstrap) on the same data
    from fiaudit.models.tree import fit_classification_tree
    t = fit_classification_tree(ds.X, ds.y, np.arange(ds.n_rows, dtype=np.int64), max_depth=1,
                                min_samples_leaf=1, max_features=None, rng=np.random.default_rng(0))
    assert b.stages[0].feature[0] == t.feature[0] == 0
    assert b.stages[0].threshold[0] == t.threshold[0]


def test_forest_mean_of_trees(small_models, mixed_data):
    _, hold = mixed_data
    f = small_models["random_forest"]
    rows = hold.X[:10]
    assert np.allclose(f.predict_proba(rows), f.tree_probas(rows).mean(axis=0), atol=1e-15)


def test_forest_accuracy_band(default_split):
    train, hold = default_split
    lr = evaluate_accuracy(train_logistic(train), hold).accuracy
    rf = evaluate_accuracy(train_random_forest(train, n_trees=40, max_depth=10, seed=0), hold).accuracy
    gb = evaluate_accuracy(train_gradient_boosting(train, n_stages=50, seed=0), hold).accuracy
    assert rf >= lr - 0.05
    assert gb >= rf - 0.05


def test_boosting_loss_decreases(mixed_data):
    train, _ = mixed_data
    b = train_gradient_boosting(train, n_stages=20, max_depth=2)
    assert b.train_loss[-1] < b.train_loss[0]
    with pytest.raises(ConfigError):
        train_gradient_boosting(train, learning_rate=0.0)


def test_boosting_formula(small_models, mixed_data):
    _, hold = mixed_data
    b = small_models["gradient_boosting"]
    acc = sum(t.predict(hold.X) for t in b.stages)
    assert np.allclose(b.predict_proba(hold.X), sigmoid(b.initial + b.learning_rate * acc))


def test_mlp_zero_epochs_near_prior(mixed_data):
    train, hold = mixed_data
    m = train_mlp(train, layer_widths=(8, 8, 8, 8), epochs=0)
    p = predict_proba(m, hold.X)
    assert ((p > 0) & (p < 1)).all()
    assert abs(p.mean() - train.y.mean()) < 0.05


def test_mlp_validation(mixed_data):
    train, _ = mixed_data
    with pytest.raises(ConfigError):
        train_mlp(train, layer_widths=(8, 8, 8))
    with pytest.raises(ConfigError):
        train_mlp(train, dropout_rate=1.0)


def test_mlp_gradient_inference_mode():
    assert mlp_grad_check(train_mode=False) < 1e-4


def test_mlp_gradient_batch_stats_mode():
    assert mlp_grad_check(train_mode=True, seed=1) < 1e-4


def test_mlp_xor():
    rng = np.random.default_rng(0)
    X = rng.uniform(-1, 1, size=(1200, 2))
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0)).astype(int)
    ds = Dataset(FeatureSchema.from_columns(["u", "v"]), X, y, np.arange(1200))
    m = train_mlp(ds, layer_widths=(32, 16, 8, 8), dropout_rate=0.0, epochs=60, batch_size=64,
                  learning_rate=5e-3, seed=0)
    assert evaluate_accuracy(m, ds).accuracy >= 0.95
    assert evaluate_accuracy(train_logistic(ds), ds).accuracy < 0.7


def test_mlp_inference_deterministic(small_models, mixed_data):
    _, hold = mixed_data
    m = small_models["mlp"]
    assert np.array_equal(m.predict_proba(hold.X), m.predict_proba(hold.X))
    # row-wise: a row's prediction does not depend on the rest of the batch
    assert np.array_equal(m.predict_proba(hold.X[:1]), m.predict_proba(hold.X)[:1])


def test_training_deterministic(mixed_data):
    train, hold = mixed_data
    for fit in (lambda: train_random_forest(train, n_trees=3, max_depth=4, seed=9),
                lambda: train_gradient_boosting(train, n_stages=5, seed=9),
                lambda: train_mlp(train, layer_widths=(8, 8, 4, 4), epochs=2, seed=9)):
        a, b = fit(), fit()
        assert predict_proba(a, hold.X).tobytes() == predict_proba(b, hold.X).tobytes()


@pytest.mark.parametrize("kind", ["logistic", "random_forest", "gradient_boosting", "mlp"])
def test_serialization_round_trip(kind, small_models, mixed_data):
    _, hold = mixed_data
    m = small_models[kind]
    doc = json.loads(json.dumps(model_to_dict(m)))
    back = model_from_dict(doc)
    assert back.kind == kind
    assert predict_proba(back, hold.X).tobytes() == predict_proba(m, hold.X).tobytes()
    doc["schema_hash"] = "0" * 16
    with pytest.raises(DataError):
        model_from_dict(doc)


def test_width_mismatch(small_models):
    with pytest.raises(DataError):
        predict_proba(small_models["logistic"], np.zeros((2, 3)))


def test_accuracy_perfect_and_constant():
    ds = _threshold_data(10)
    s = ds.schema
    perfect = ForestModel(s, (Tree([0, -1, -1], [0.5, 0, 0], [1, -1, -1], [2, -1, -1],
                                   [0, 0.0, 1.0], [1.0, 1, 1], [0.0, 0, 0]),), 1, 1, 1, 0)
    r = evaluate_accuracy(perfect, ds)
    assert r.accuracy == 1.0 and r.fp == 0 and r.fn == 0
    half = ForestModel(s, (_leaf(0.5),), 1, 1, 1, 0)
    bal = ds.subset([0, 1, 8, 9])
    r = evaluate_accuracy(half, bal)
    assert r.accuracy == 0.5 and r.tp == 2 and r.fp == 2


def test_gini_gain_nonnegative(small_models):
    for t in small_models["random_forest"].trees:
        internal = np.flatnonzero(t.feature >= 0)
        for node in internal:
            l, r = t.left[node], t.right[node]
            dec = (t.n_samples[node] * t.impurity[node] - t.n_samples[l] * t.impurity[l]
                   - t.n_samples[r] * t.impurity[r])
            assert dec >= -1e-9
