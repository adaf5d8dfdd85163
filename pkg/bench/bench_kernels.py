"""Time the compiled tree kernels against the numpy fallback.

    python3 bench/bench_kernels.py --rows 20000 --repeats 5

Both backends are imported directly, so the environment switch is not needed.
The forest row swaps the kernel module seen by the tree learner for the run.
"""
import argparse
import timeit

import numpy as np

from fiaudit import _kernels_py
from fiaudit.dataset import default_synthetic_spec, generate_synthetic
from fiaudit.models import tree as tree_mod

try:
    from fiaudit import _kernels_c
except ImportError:
    _kernels_c = None


def _best(fn, repeats):
    return min(timeit.repeat(fn, number=1, repeat=repeats))


def bench_best_split(kern, X, target, repeats):
    idx = np.arange(X.shape[0], dtype=np.int64)
    feats = np.arange(X.shape[1], dtype=np.int64)
    return _best(lambda: kern.best_split(X, target, idx, feats, 1), repeats)


def bench_predict(kern, X, tree, repeats):
    return _best(lambda: kern.predict_tree(X, tree.feature, tree.threshold, tree.left,
                                           tree.right, tree.value), repeats)


def bench_forest(kern, ds, n_trees, repeats):
    saved = tree_mod.kernels
    tree_mod.kernels = kern
    try:
        return _best(lambda: tree_mod.train_random_forest(ds, n_trees=n_trees, max_depth=8, seed=0),
                     repeats)
    finally:
        tree_mod.kernels = saved


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--trees", type=int, default=5, help="forest size for the end-to-end row")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args(argv)

    ds = generate_synthetic(default_synthetic_spec(args.rows), seed=0)
    X, target = ds.X, ds.y.astype(np.float64)
    ref = tree_mod.train_random_forest(ds, n_trees=1, max_depth=12, seed=0).trees[0]

    backends = [("python", _kernels_py)]
    if _kernels_c is not None:
        backends.append(("cython", _kernels_c))
    else:
        print("compiled extension not built; timing the numpy fallback only")

    rows = []
    for name, kern in backends:
        rows.append((name,
                     bench_best_split(kern, X, target, args.repeats),
                     bench_predict(kern, X, ref, args.repeats),
                     bench_forest(kern, ds, args.trees, args.repeats)))

    print(f"{args.rows} rows x {X.shape[1]} columns, best of {args.repeats}")
    print(f"{'backend':<8} {'best_split s':>13} {'predict_tree s':>15} {'forest fit s':>13}")
    for name, a, b, c in rows:
        print(f"{name:<8} {a:13.4f} {b:15.4f} {c:13.3f}")
    if len(rows) == 2:
        (_, pa, pb, pc), (_, ca, cb, cc) = rows
        print(f"{'speedup':<8} {pa / ca:12.1f}x {pb / cb:14.1f}x {pc / cc:12.1f}x")


if __name__ == "__main__":
    main()
