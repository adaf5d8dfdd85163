import numpy as np
import pytest

from fiaudit import _kernels_py
from fiaudit._backend import BACKEND

kc = pytest.importorskip("fiaudit._kernels_c", reason="compiled kernels not built")


def _case(rng, n=60, m=4, discrete=False):
    X = rng.normal(size=(n, m))
    if discrete:
        X = np.round(X)  # lots of ties
    y = (rng.random(n) < 0.5).astype(np.float64)
    idx = np.sort(rng.choice(n, size=rng.integers(2, n + 1), replace=True)).astype(np.int64)
    feats = rng.permutation(m).astype(np.int64)
    return np.ascontiguousarray(X), y, idx, feats


# 1200 rows reaches the compiled argsort path for large nodes, 60 the qsort path
@pytest.mark.parametrize("n", [60, 1200])
@pytest.mark.parametrize("discrete", [False, True])
def test_best_split_backends_bit_identical(discrete, n):
    rng = np.random.default_rng(0)
    for _ in range(200 if n < 256 else 40):
        X, y, idx, feats = _case(rng, n=n, discrete=discrete)
        leaf = int(rng.integers(1, 4))
        a = _kernels_py.best_split(X, y, idx, feats, leaf)
        b = kc.best_split(X, y, idx, feats, leaf)
        assert a[0] == b[0]
        if a[0] >= 0:
            assert a[1] == b[1] and a[2] == b[2]


def test_best_split_regression_target_identical():
    rng = np.random.default_rng(1)
    for _ in range(50):
        X, _, idx, feats = _case(rng)
        t = rng.normal(size=X.shape[0])
        assert _kernels_py.best_split(X, t, idx, feats, 2) == kc.best_split(X, t, idx, feats, 2)


def test_best_split_threshold_data():
    x = np.linspace(0, 1, 21).reshape(-1, 1)
    y = (x[:, 0] > 0.5).astype(np.float64)
    idx = np.arange(21, dtype=np.int64)
    for k in (_kernels_py, kc):
        f, thr, gain = k.best_split(x, y, idx, np.array([0], dtype=np.int64), 1)
        assert f == 0 and 0.5 <= thr < 0.55 and gain > 0


def test_no_split_when_constant():
    X = np.ones((10, 2))
    y = np.r_[np.zeros(5), np.ones(5)]
    idx = np.arange(10, dtype=np.int64)
    for k in (_kernels_py, kc):
        assert k.best_split(X, y, idx, np.arange(2, dtype=np.int64), 1)[0] == -1


def test_traversal_identical():
    rng = np.random.default_rng(2)
    # root splits on f0, left child leaf, right child splits on f1
    feature = np.array([0, -1, 1, -1, -1], dtype=np.int64)
    threshold = np.array([0.0, 0, 0.5, 0, 0])
    left = np.array([1, -1, 3, -1, -1], dtype=np.int64)
    right = np.array([2, -1, 4, -1, -1], dtype=np.int64)
    value = np.array([0, 0.1, 0, 0.6, 0.9])
    X = rng.normal(size=(500, 2))
    p1 = _kernels_py.predict_tree(X, feature, threshold, left, right, value)
    p2 = kc.predict_tree(X, feature, threshold, left, right, value)
    assert np.array_equal(p1, p2)
    leaves = _kernels_py.apply_tree(X, feature, threshold, left, right)
    assert np.array_equal(leaves, kc.apply_tree(X, feature, threshold, left, right))
    expect = np.where(X[:, 0] <= 0, 0.1, np.where(X[:, 1] <= 0.5, 0.6, 0.9))
    assert np.array_equal(p1, expect)


def test_backend_selected():
    assert BACKEND in ("cython", "python")
