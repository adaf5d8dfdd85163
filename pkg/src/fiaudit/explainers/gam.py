"""Global attribution mapping: k-medoids over normalised local attributions.

Distance between two normalised attribution vectors ``a`` and ``b``::

    d(a, b) = sum_j max(a_j, b_j) * (rank_a(j) - rank_b(j)) ** 2

where ``rank_a(j)`` is feature ``j``'s 0-based position when ``a`` is sorted in
descending order (ties by column index). Disagreement about the order of
heavily weighted features costs the most.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import ConfigError, DataError
from .base import Attribution, ImportanceRanking

UNSUPERVISED = "unsupervised"
LABEL_FORCED = "label_forced"


def normalize_attributions(attributions) -> np.ndarray:
    """``|phi| / sum |phi|`` per row; an all-zero row becomes uniform."""
    A = np.abs(np.array([a.values if isinstance(a, Attribution) else a for a in attributions],
                        dtype=np.float64))
    tot = A.sum(axis=1, keepdims=True)
    out = np.full_like(A, 1.0 / A.shape[1]) if A.size else A
    np.divide(A, tot, out=out, where=tot > 0)
    return out


def rank_positions(V: np.ndarray) -> np.ndarray:
    order = np.argsort(-V, axis=1, kind="stable")
    ranks = np.empty_like(order)
    rows = np.arange(V.shape[0])[:, None]
    ranks[rows, order] = np.arange(V.shape[1])[None, :]
    return ranks.astype(np.float64)


def rank_distance_matrix(V: np.ndarray, W: np.ndarray | None = None) -> np.ndarray:
    """Pairwise weighted-rank distances between rows of ``V`` and rows of ``W``."""
    W = V if W is None else W
    RV, RW = rank_positions(V), rank_positions(W)
    D = np.empty((V.shape[0], W.shape[0]))
    step = max(1, 2_000_000 // max(1, W.shape[0] * V.shape[1]))
    for s in range(0, V.shape[0], step):
        wt = np.maximum(V[s:s + step, None, :], W[None, :, :])
        dr = RV[s:s + step, None, :] - RW[None, :, :]
        D[s:s + step] = (wt * dr * dr).sum(axis=2)
    return D


@dataclass(frozen=True, eq=False)
class GamCluster:
    medoid: np.ndarray
    medoid_index: int
    proportion: float
    members: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class GamResult:
    clusters: tuple[GamCluster, ...]
    K: int
    mode: str
    names: tuple[str, ...] = ()
    objective_history: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "mode": self.mode,
            "objective_history": list(self.objective_history),
            "clusters": [
                {
                    "medoid": dict(zip(self.names, c.medoid.tolist())) if self.names else c.medoid.tolist(),
                    "medoid_instance": c.medoid_index,
                    "proportion": c.proportion,
                    "members": list(c.members),
                }
                for c in self.clusters
            ],
        }


def _assign(D: np.ndarray, medoids: list[int]) -> tuple[np.ndarray, float]:
    sub = D[:, medoids]
    labels = sub.argmin(axis=1)
    # distinct points can be at distance 0 (same rank order); a medoid stays in its own cluster
    labels[medoids] = np.arange(len(medoids))
    return labels, float(sub[np.arange(D.shape[0]), labels].sum())


def k_medoids(D: np.ndarray, K: int, max_iters: int = 100) -> tuple[list[int], np.ndarray, list[float]]:
    """PAM-style k-medoids on a precomputed distance matrix.

    Init: the most central point, then repeatedly the point farthest from its
    nearest chosen medoid. Then alternate assignment, per-cluster medoid
    update, and the best single medoid/non-medoid swap until nothing improves.
    Returns medoids, labels and the objective after every assignment.
    """
    n = D.shape[0]
    medoids = [int(D.sum(axis=1).argmin())]
    while len(medoids) < K:
        nearest = D[:, medoids].min(axis=1)
        nearest[medoids] = -1.0
        medoids.append(int(nearest.argmax()))
    labels, obj = _assign(D, medoids)
    history = [obj]
    for _ in range(max_iters):
        changed = False
        for k in range(K):
            members = np.flatnonzero(labels == k)
            if members.size == 0:
                continue
            costs = D[np.ix_(members, members)].sum(axis=0)
            best = int(members[costs.argmin()])
            if costs.min() < D[medoids[k], members].sum() and best not in medoids:
                medoids[k] = best
                changed = True
        labels, obj = _assign(D, medoids)
        history.append(obj)
        # swap phase
        best_gain, best_swap = 0.0, None
        is_med = np.zeros(n, dtype=bool)
        is_med[medoids] = True
        for k in range(K):
            others = [m for i, m in enumerate(medoids) if i != k]
            rest = D[:, others].min(axis=1) if others else np.full(n, np.inf)
            cand_cost = np.minimum(D, rest[:, None]).sum(axis=0)
            cand_cost[is_med] = np.inf
            o = int(cand_cost.argmin())
            gain = obj - cand_cost[o]
            if gain > best_gain + 1e-12:
                best_gain, best_swap = gain, (k, o)
        if best_swap is not None:
            medoids[best_swap[0]] = best_swap[1]
            labels, obj = _assign(D, medoids)
            history.append(obj)
            changed = True
        if not changed:
            break
    return medoids, labels, history


def gam_cluster(attributions: Sequence[Attribution], K: int = 2, max_iters: int = 100,
                seed: int = 0) -> GamResult:
    """Cluster local attributions into ``K`` global explanations.

    The procedure is deterministic; ``seed`` is accepted for interface
    uniformity only.
    """
    if K < 1:
        raise ConfigError("K must be >= 1")
    if len(attributions) < K:
        raise DataError(f"need at least K={K} attributions, got {len(attributions)}")
    V = normalize_attributions(attributions)
    D = rank_distance_matrix(V)
    medoids, labels, history = k_medoids(D, K, max_iters)
    ids = [int(a.instance_id) if isinstance(a, Attribution) else i for i, a in enumerate(attributions)]
    n = len(attributions)
    clusters = []
    for k, m in enumerate(medoids):
        members = np.flatnonzero(labels == k)
        clusters.append(GamCluster(V[m].copy(), ids[m], members.size / n,
                                   tuple(ids[i] for i in members)))
    names = attributions[0].names if isinstance(attributions[0], Attribution) else ()
    return GamResult(tuple(clusters), K, UNSUPERVISED, tuple(names), tuple(history))


def gam_by_label(attributions: Sequence[Attribution], labels, subsample: int | None = None,
                 seed: int = 0, model_kind: str = "") -> tuple[ImportanceRanking, ImportanceRanking]:
    """Label-forced subpopulations: mean normalised attribution per class.

    Returns ``(good_ranking, bad_ranking)``. With ``subsample`` set, at most
    that many attributions per class are drawn (seeded) before averaging.
    """
    labels = np.asarray(labels)
    if labels.shape[0] != len(attributions):
        raise DataError("labels and attributions are not aligned")
    V = normalize_attributions(attributions)
    names = list(attributions[0].names)
    rng = np.random.default_rng(seed)
    out = []
    for cls, cname in ((1, "good"), (0, "bad")):
        idx = np.flatnonzero(labels == cls)
        if idx.size == 0:
            raise DataError(f"class {cname} has no attributions")
        if subsample is not None and idx.size > subsample:
            idx = np.sort(rng.choice(idx, size=subsample, replace=False))
        out.append(ImportanceRanking.from_scores(names, V[idx].mean(axis=0), f"gam_{cname}", model_kind))
    return out[0], out[1]


def gam_label_result(attributions: Sequence[Attribution], labels) -> GamResult:
    """Label-forced clustering expressed as a GamResult (one cluster per class present)."""
    labels = np.asarray(labels)
    V = normalize_attributions(attributions)
    D = rank_distance_matrix(V)
    ids = [int(a.instance_id) for a in attributions]
    n = len(attributions)
    clusters = []
    obj = 0.0
    for cls in (1, 0):
        members = np.flatnonzero(labels == cls)
        if members.size == 0:
            continue
        costs = D[np.ix_(members, members)].sum(axis=0)
        m = int(members[costs.argmin()])
        obj += float(costs.min())
        clusters.append(GamCluster(V[m].copy(), ids[m], members.size / n, tuple(ids[i] for i in members)))
    return GamResult(tuple(clusters), len(clusters), LABEL_FORCED, tuple(attributions[0].names), (obj,))
