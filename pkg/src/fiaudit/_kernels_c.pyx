# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled tree kernels; same contract as ``fiaudit._kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free, qsort
from libc.math cimport INFINITY

cnp.import_array()

# below this node size qsort beats the call overhead of numpy's stable argsort
cdef enum:
    SMALL_NODE = 256


cdef struct Pair:
    double value
    cnp.int64_t index


cdef int _cmp_pair(const void* a, const void* b) noexcept nogil:
    cdef const Pair* pa = <const Pair*> a
    cdef const Pair* pb = <const Pair*> b
    if pa.value < pb.value:
        return -1
    if pa.value > pb.value:
        return 1
    # ties ordered by row index, matching numpy's stable argsort on ascending idx
    if pa.index < pb.index:
        return -1
    if pa.index > pb.index:
        return 1
    return 0


def best_split(const double[:, ::1] X, const double[::1] target,
               const cnp.int64_t[::1] idx, const cnp.int64_t[::1] features,
               Py_ssize_t min_samples_leaf):
    cdef Py_ssize_t n = idx.shape[0]
    cdef Py_ssize_t n_feat = features.shape[0]
    cdef cnp.int64_t best_feature = -1
    cdef double best_threshold = 0.0
    cdef double best_gain = -INFINITY
    if n < 2 * min_samples_leaf or n < 2:
        return best_feature, best_threshold, best_gain

    cdef Pair* pairs = <Pair*> malloc(n * sizeof(Pair))
    if pairs == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, k
    cdef cnp.int64_t f
    cdef double total, s_left, s_right, gain, n_f, n_left, n_right, thr
    cdef double feat_gain
    cdef Py_ssize_t feat_pos
    cdef cnp.int64_t[::1] order
    cdef object X_np = np.asarray(X)
    cdef object idx_np = np.asarray(idx)
    n_f = <double> n
    try:
        for k in range(n_feat):
            f = features[k]
            if n >= SMALL_NODE:
                # stable sort of values listed in ascending row order breaks ties by row index
                order = np.argsort(X_np[idx_np, f], kind="stable").astype(np.int64, copy=False)
                for i in range(n):
                    pairs[i].value = X[idx[order[i]], f]
                    pairs[i].index = idx[order[i]]
            else:
                for i in range(n):
                    pairs[i].value = X[idx[i], f]
                    pairs[i].index = idx[i]
                qsort(pairs, n, sizeof(Pair), _cmp_pair)
            with nogil:
                total = 0.0
                for i in range(n):
                    total = total + target[pairs[i].index]
                feat_gain = -INFINITY
                feat_pos = -1
                s_left = 0.0
                for i in range(n - 1):
                    s_left = s_left + target[pairs[i].index]
                    if i < min_samples_leaf - 1 or i >= n - min_samples_leaf:
                        continue
                    if not (pairs[i].value < pairs[i + 1].value):
                        continue
                    n_left = <double> (i + 1)
                    n_right = n_f - n_left
                    s_right = total - s_left
                    gain = s_left * s_left / n_left + s_right * s_right / n_right - total * total / n_f
                    if gain > feat_gain:
                        feat_gain = gain
                        feat_pos = i
                if feat_pos >= 0 and feat_gain > best_gain:
                    best_gain = feat_gain
                    best_feature = f
                    thr = (pairs[feat_pos].value + pairs[feat_pos + 1].value) / 2.0
                    if thr == pairs[feat_pos + 1].value:
                        thr = pairs[feat_pos].value
                    best_threshold = thr
    finally:
        free(pairs)
    return best_feature, best_threshold, best_gain


def predict_tree(const double[:, ::1] X, const cnp.int64_t[::1] feature,
                 const double[::1] threshold, const cnp.int64_t[::1] left,
                 const cnp.int64_t[::1] right, const double[::1] value):
    cdef Py_ssize_t n = X.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] out_v = out
    cdef Py_ssize_t i
    cdef cnp.int64_t node
    with nogil:
        for i in range(n):
            node = 0
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            out_v[i] = value[node]
    return out


def apply_tree(const double[:, ::1] X, const cnp.int64_t[::1] feature,
               const double[::1] threshold, const cnp.int64_t[::1] left,
               const cnp.int64_t[::1] right):
    cdef Py_ssize_t n = X.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] out_v = out
    cdef Py_ssize_t i
    cdef cnp.int64_t node
    with nogil:
        for i in range(n):
            node = 0
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            out_v[i] = node
    return out
