import warnings

import numpy as np
import pytest

from conftest import FunctionModel, three_feature_spec
from fiaudit.dataset import generate_synthetic
from fiaudit.errors import ConfigError, DataError
from fiaudit.models import train_logistic
from fiaudit.perturbation import (DEFAULT_MULTIPLIERS, DEFAULT_PROPORTIONS, PerturbationConfig,
                                  PerturbationCurve, dynamic_importance, flip_categorical,
                                  flip_rows, flip_selection, n_new_ones, resolve_targets,
                                  run_perturbations, sensitivity_score, sweep_continuous)


def _curve(values, grid=None):
    grid = grid if grid is not None else list(range(len(values)))
    return PerturbationCurve("f", "continuous", grid, values, values[0])


def test_default_grids():
    assert DEFAULT_MULTIPLIERS[0] == 0.5 and DEFAULT_MULTIPLIERS[-1] == 1.5 and len(DEFAULT_MULTIPLIERS) == 11
    assert 1.0 in DEFAULT_MULTIPLIERS
    assert DEFAULT_PROPORTIONS[0] == 0.05 and DEFAULT_PROPORTIONS[-1] == 1.0 and len(DEFAULT_PROPORTIONS) == 20


def test_identity_point(small_models, mixed_data):
    _, hold = mixed_data
    for m in small_models.values():
        c = sweep_continuous(m, hold, "a")
        i = list(c.grid).index(1.0)
        assert abs(c.values[i] - c.base_value) < 1e-12


def test_sweep_rejects_categorical(small_models, mixed_data):
    _, hold = mixed_data
    with pytest.raises(ConfigError, match="use flip_categorical"):
        sweep_continuous(small_models["logistic"], hold, "g=x")
    with pytest.raises(ConfigError):
        sweep_continuous(small_models["logistic"], hold, "a", [0.4, 1.0])
    with pytest.raises(ConfigError):
        sweep_continuous(small_models["logistic"], hold, "a", [1.2, 1.0])


def test_holdout_untouched(small_models, mixed_data):
    _, hold = mixed_data
    before = hold.X.copy()
    run_perturbations(small_models["random_forest"], hold, ["a", "g"],
                      PerturbationConfig(repeats=2))
    assert np.array_equal(before, hold.X)


def test_logistic_sweep_monotone(mixed_data):
    train, hold = mixed_data
    m = train_logistic(train)
    for name, sign in (("a", 1), ("b", -1)):
        c = sweep_continuous(m, hold, name)
        assert (np.diff(c.values) * sign >= 0).all()


def test_dummy_feature_flat(mixed_data):
    _, hold = mixed_data
    m = FunctionModel(hold.schema, lambda X: 1 / (1 + np.exp(-X[:, 0] + 1)))
    assert sensitivity_score(sweep_continuous(m, hold, "b")).score < 1e-9
    c = flip_categorical(m, hold, "g", "x", repeats=3)
    assert np.allclose(c.values, c.base_value, atol=1e-9)


def test_flip_counts_and_one_hot(mixed_data):
    _, hold = mixed_data
    cols = hold.schema.groups["g"]
    target = hold.schema.index("g=y")
    n1 = int(hold.X[:, target].sum())
    zero_rows = np.flatnonzero(hold.X[:, target] == 0)
    for p in (0.05, 0.5, 1.0):
        k = n_new_ones(p, n1)
        sel = flip_selection(zero_rows, k, 3, p, 0)
        Xp = flip_rows(hold.X, cols, target, sel)
        assert Xp[:, target].sum() == n1 + k
        assert (Xp[:, cols].sum(axis=1) == 1.0).all()
    assert n_new_ones(0.05, 100) == 5


def test_flip_errors_and_clamp(small_models, mixed_data):
    _, hold = mixed_data
    m = small_models["logistic"]
    with pytest.raises(ConfigError):
        flip_categorical(m, hold, "a", "x")
    with pytest.raises(ConfigError):
        flip_categorical(m, hold, "g", "x", proportions=[0.0, 1.5])
    absent = hold.subset(np.flatnonzero(hold.X[:, hold.schema.index("g=z")] == 0))
    with pytest.raises(DataError, match="level absent from holdout"):
        flip_categorical(m, absent, "g", "z")
    is_x = hold.X[:, hold.schema.index("g=x")] == 1
    mostly_x = hold.subset(np.r_[np.flatnonzero(is_x), np.flatnonzero(~is_x)[:10]])
    with pytest.warns(RuntimeWarning, match="clamped"):
        flip_categorical(m, mostly_x, "g", "x", proportions=[1.0], repeats=1)


def test_flip_zero_proportion_is_base(small_models, mixed_data):
    _, hold = mixed_data
    c = flip_categorical(small_models["mlp"], hold, "g", "z", proportions=[0.0, 0.5], repeats=2)
    assert c.values[0] == c.base_value


def test_flip_fast_path_matches_naive(small_models, mixed_data):
    _, hold = mixed_data
    m = small_models["gradient_boosting"]
    cols = hold.schema.groups["g"]
    target = hold.schema.index("g=z")
    n1 = int(hold.X[:, target].sum())
    zero_rows = np.flatnonzero(hold.X[:, target] == 0)
    grid = [0.1, 0.3]
    c = flip_categorical(m, hold, "g", "z", grid, repeats=3, seed=8)
    from fiaudit.models import predict_proba
    for p, got in zip(grid, c.values):
        draws = [predict_proba(m, flip_rows(hold.X, cols, target,
                                            flip_selection(zero_rows, n_new_ones(p, n1), 8, p, r))).mean()
                 for r in range(3)]
        assert abs(np.mean(draws) - got) < 1e-12


def test_flip_schedule_order_free(small_models, mixed_data):
    _, hold = mixed_data
    m = small_models["random_forest"]
    full = flip_categorical(m, hold, "g", "y", [0.1, 0.2, 0.3], repeats=4, seed=2)
    part = flip_categorical(m, hold, "g", "y", [0.3], repeats=4, seed=2)
    assert full.values[2] == part.values[0]


def test_sensitivity_examples():
    s = sensitivity_score(_curve([0.5, 0.5, 0.5]))
    assert s.score == 0 and s.monotone and s.reversal_points == ()
    s = sensitivity_score(_curve([0.2, 0.5, 0.4], [1.0, 2.0, 3.0]), tol=0.01)
    assert abs(s.score - 0.3) < 1e-12 and not s.monotone and s.reversal_points == (3.0,)
    rf = sensitivity_score(_curve([0.2525, 0.339, 0.538, 0.554, 0.548], [0.8, 0.9, 1.0, 1.1, 1.2]))
    assert not rf.monotone and rf.reversal_points == (1.2,)


def test_curve_validation():
    with pytest.raises(DataError):
        _curve([0.5, 0.4], [1.0, 1.0])
    with pytest.raises(DataError):
        _curve([0.5, 1.0])


def test_resolve_targets(mixed_data):
    schema = mixed_data[0].schema
    assert resolve_targets(schema, ["g"]) == [("g", "x"), ("g", "y"), ("g", "z")]
    assert resolve_targets(schema, ["g=y", "a"]) == [("g", "y"), ("a", None)]
    assert len(resolve_targets(schema, None)) == 6


def test_dynamic_ranking_orders_weights():
    ds = generate_synthetic(three_feature_spec(n_rows=4000), 3)
    m = train_logistic(ds)
    r = dynamic_importance(m, ds)
    assert r.names == ["f0", "f1", "f2"]
    assert r.entries == dynamic_importance(m, ds).entries


def test_single_feature_model(mixed_data):
    _, hold = mixed_data
    m = FunctionModel(hold.schema, lambda X: 1 / (1 + np.exp(-X[:, 0] + 1)))
    r = dynamic_importance(m, hold, config=PerturbationConfig(repeats=2))
    assert r.names[0] == "a" and r.scores["a"] > 0
    assert all(v < 1e-9 for k, v in r.scores.items() if k != "a")
