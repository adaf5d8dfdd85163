"""Pure-numpy tree kernels.

Reference implementation of the two hot loops used by the tree learners:
exhaustive best-split search and tree traversal. ``_kernels_c`` mirrors these
functions and must return bit-identical results; the arithmetic below is
written in the same order as the compiled version for that reason.
"""
import numpy as np


def best_split(X, target, idx, features, min_samples_leaf):
    """Find the split that maximises the sum-of-squares reduction of ``target``.

    For a binary 0/1 target this reduction is exactly half the count-weighted
    gini decrease, so classification and regression trees share this kernel.

    Args:
        X: float64 matrix (n_rows, n_features).
        target: float64 vector, one value per row of ``X``.
        idx: ascending int64 row indices belonging to the node.
        features: int64 candidate feature indices, scanned in the given order.
        min_samples_leaf: minimum rows on each side of an accepted split.

    Returns:
        ``(feature, threshold, gain)``; feature is -1 when no admissible split
        exists. Rows with ``x <= threshold`` go left.
    """
    n = idx.shape[0]
    best_feature = -1
    best_threshold = 0.0
    best_gain = -np.inf
    if n < 2 * min_samples_leaf or n < 2:
        return best_feature, best_threshold, best_gain

    t_node = target[idx]
    n_f = float(n)
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n_f - n_left
    lo = min_samples_leaf - 1
    hi = n - min_samples_leaf
    for f in features:
        vals = X[idx, f]
        order = np.argsort(vals, kind="stable")
        v = vals[order]
        cs = np.cumsum(t_node[order])
        total = cs[-1]
        s_left = cs[:-1]
        s_right = total - s_left
        gain = s_left * s_left / n_left + s_right * s_right / n_right - total * total / n_f
        ok = v[:-1] < v[1:]
        ok[:lo] = False
        ok[hi:] = False
        if not ok.any():
            continue
        gain = np.where(ok, gain, -np.inf)
        pos = int(np.argmax(gain))
        if gain[pos] > best_gain:
            best_gain = float(gain[pos])
            best_feature = int(f)
            thr = (v[pos] + v[pos + 1]) / 2.0
            if thr == v[pos + 1]:
                thr = v[pos]
            best_threshold = float(thr)
    return best_feature, best_threshold, best_gain


def predict_tree(X, feature, threshold, left, right, value):
    """Route every row of ``X`` to a leaf and return the leaf values.

    Internal nodes have ``feature >= 0``; leaves have ``feature == -1``.
    """
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    active = feature[node] >= 0
    while active.any():
        r = rows[active]
        nd = node[r]
        go_left = X[r, feature[nd]] <= threshold[nd]
        node[r] = np.where(go_left, left[nd], right[nd])
        active = feature[node] >= 0
    return value[node]


def apply_tree(X, feature, threshold, left, right):
    """Leaf index reached by each row."""
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    active = feature[node] >= 0
    while active.any():
        r = rows[active]
        nd = node[r]
        go_left = X[r, feature[nd]] <= threshold[nd]
        node[r] = np.where(go_left, left[nd], right[nd])
        active = feature[node] >= 0
    return node
