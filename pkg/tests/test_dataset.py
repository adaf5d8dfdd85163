import json

import numpy as np
import pytest

from fiaudit.dataset import (BAD, GOOD, LENDING_CLUB_RULE, ContinuousSpec, Dataset, FeatureSchema,
                             GroupSpec, LabelRule, SchemaConfig, SyntheticSpec, balanced_sample,
                             decode_one_hot, default_synthetic_spec, encode_one_hot,
                             generate_synthetic, load_csv, train_holdout_split, write_csv)
from fiaudit.errors import ConfigError, DataError
from fiaudit.models import train_logistic


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


SMALL_CFG = SchemaConfig(("amt",), {"grade": ["A", "B", "D"]})


def test_label_rule_three_rows(tmp_path):
    rule = LabelRule(frozenset({"Fully Paid"}), frozenset({"Default"}))
    cfg = SchemaConfig(("amt",), {"grade": ["A", "B"]}, label_rule=rule)
    p = _write(tmp_path / "a.csv", "amt,grade,loan_status\n1,A,Fully Paid\n2,B,Default\n"
                                   "3,A,Current-with-derog\n")
    ds = load_csv(p, cfg)
    assert ds.y.tolist() == [1, 0]
    rep = ds.load_report
    assert (rep.kept, rep.dropped_label) == (2, 1)


def test_missing_label_column(tmp_path):
    p = _write(tmp_path / "a.csv", "amt,grade\n1,A\n")
    with pytest.raises(DataError, match="missing column"):
        load_csv(p, SMALL_CFG)


def test_unknown_level_and_bad_number_dropped(tmp_path):
    p = _write(tmp_path / "a.csv", "amt,grade,loan_status\n1,A,Fully Paid\n2,Z,Fully Paid\n"
                                   "x,B,Charged Off\n13.5%,D,Charged Off\n,A,Fully Paid\n")
    ds = load_csv(p, SMALL_CFG)
    rep = ds.load_report.to_dict()
    assert rep["kept"] == 2 and rep["dropped_level"] == 1 and rep["dropped_parse"] == 2
    assert rep["kept"] + rep["dropped_parse"] + rep["dropped_label"] + rep["dropped_level"] == 5
    assert ds.X[:, 0].tolist() == [1.0, 13.5]


def test_empty_after_filter(tmp_path):
    p = _write(tmp_path / "a.csv", "amt,grade,loan_status\n1,A,Weird\n")
    with pytest.raises(DataError, match="no rows left"):
        load_csv(p, SMALL_CFG)


def test_inferred_levels(tmp_path):
    p = _write(tmp_path / "a.csv", "amt,grade,loan_status\n1,B,Fully Paid\n2,A,Charged Off\n")
    ds = load_csv(p, SchemaConfig(("amt",), {"grade": None}))
    assert ds.schema.levels("grade") == ["A", "B"]


def test_csv_round_trip_bit_identical(tmp_path):
    ds = generate_synthetic(default_synthetic_spec(100), seed=3)
    path = tmp_path / "s.csv"
    write_csv(ds, path)
    cfg = SchemaConfig(tuple(ds.schema.continuous_names),
                       {g: ds.schema.levels(g) for g in ds.schema.groups}, id_column="id")
    back = load_csv(path, cfg)
    assert back.equals(ds)
    assert back.X.tobytes() == ds.X.tobytes()


def test_lending_club_rule_disjoint():
    assert not LENDING_CLUB_RULE.good_statuses & LENDING_CLUB_RULE.bad_statuses
    assert LENDING_CLUB_RULE.classify("Fully Paid") == GOOD
    assert LENDING_CLUB_RULE.classify("Charged Off") == BAD
    assert LENDING_CLUB_RULE.classify("Issued") is None
    with pytest.raises(ConfigError):
        LabelRule(frozenset({"a"}), frozenset({"a"}))


def test_encode_examples():
    m, ok = encode_one_hot(["A", "D", "A"], ["A", "B", "D"])
    assert m.tolist() == [[1, 0, 0], [0, 0, 1], [1, 0, 0]] and ok.all()
    m, ok = encode_one_hot(["Z"], ["A", "B"])
    assert not ok[0]


def test_decode_inverts_encode(rng):
    levels = ["p", "q", "r", "s"]
    vals = list(rng.choice(levels, size=200))
    m, _ = encode_one_hot(vals, levels)
    assert decode_one_hot(m, levels) == vals


def test_schema_validation():
    with pytest.raises(ConfigError):
        FeatureSchema.from_columns(["a", "a"])
    with pytest.raises(ConfigError):
        FeatureSchema.from_columns(["a"], {"g": ["only"]})
    with pytest.raises(ConfigError):
        FeatureSchema.from_columns(["g"], {"g": ["x", "y"]})
    s = FeatureSchema.from_columns(["a"], {"g": ["x", "y"]})
    assert FeatureSchema.from_dict(json.loads(json.dumps(s.to_dict()))).schema_hash() == s.schema_hash()
    assert s.players == [("a", [0]), ("g", [1, 2])]


def test_dataset_rejects_multi_hot():
    s = FeatureSchema.from_columns(["a"], {"g": ["x", "y"]})
    with pytest.raises(DataError):
        Dataset(s, [[1.0, 1.0, 1.0]], [1], [0])
    with pytest.raises(DataError):
        Dataset(s, [[1.0, 1.0, 0.0]], [2], [0])
    ds = Dataset(s, [[1.0, 1.0, 0.0]], [1], [0])
    with pytest.raises(ValueError):
        ds.X[0, 0] = 3.0


def _labelled(n_good, n_bad):
    s = FeatureSchema.from_columns(["a"])
    n = n_good + n_bad
    return Dataset(s, np.arange(n, dtype=float).reshape(-1, 1), [1] * n_good + [0] * n_bad, np.arange(n))


def test_balanced_sample():
    ds = _labelled(60, 40)
    out = balanced_sample(ds, 20, seed=1)
    assert out.class_counts() == {"good": 10, "bad": 10}
    assert np.array_equal(out.row_ids, balanced_sample(ds, 20, seed=1).row_ids)
    with pytest.raises(DataError, match="class bad has 5 < 10"):
        balanced_sample(_labelled(60, 5), 20, seed=1)
    with pytest.raises(ConfigError):
        balanced_sample(ds, 21, seed=1)


def test_holdout_split():
    ds = _labelled(50, 50)
    tr, ho = train_holdout_split(ds, 0.2, seed=0)
    assert (tr.n_rows, ho.n_rows) == (80, 20)
    assert ho.class_counts() == {"good": 10, "bad": 10}
    assert set(tr.row_ids) | set(ho.row_ids) == set(ds.row_ids)
    assert not set(tr.row_ids) & set(ho.row_ids)
    # pinned pair of seeds
    assert not np.array_equal(ho.row_ids, train_holdout_split(ds, 0.2, seed=1)[1].row_ids)
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(ConfigError):
            train_holdout_split(ds, bad, seed=0)


def test_synthetic_determinism_and_empty():
    spec = default_synthetic_spec(500)
    a, b = generate_synthetic(spec, 4), generate_synthetic(spec, 4)
    assert a.equals(b) and a.X.tobytes() == b.X.tobytes()
    empty = generate_synthetic(default_synthetic_spec(0), 4)
    assert empty.n_rows == 0 and empty.schema.n_features == spec.schema().n_features


def test_synthetic_rejects_degenerate():
    with pytest.raises(ConfigError):
        SyntheticSpec(10, (ContinuousSpec("a", "uniform", {"low": 1.0, "high": 1.0}),)).validate()
    with pytest.raises(ConfigError):
        generate_synthetic(SyntheticSpec(10, groups=(GroupSpec("g", ("x", "y"), (0.5, 0.6)),)), 0)
    with pytest.raises(ConfigError):
        SyntheticSpec(10, (ContinuousSpec("a"),), noise=0.5).validate()


def test_synthetic_spec_dict_round_trip():
    spec = default_synthetic_spec(77)
    assert SyntheticSpec.from_dict(json.loads(json.dumps(spec.to_dict()))) == spec


def test_recover_single_weight():
    spec = SyntheticSpec(10000, tuple(ContinuousSpec(f"f{i}", "uniform", {"low": 0.0, "high": 1.0})
                                      for i in range(3)), (), {"f0": 3.0}, -1.5, 0.0)
    model = train_logistic(generate_synthetic(spec, 8))
    w = model.raw_coefficients
    assert w[0] > 2.0
    assert abs(w[1]) < 0.3 and abs(w[2]) < 0.3
