"""Agreement metrics between static importance rankings and perturbation sensitivity."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import DataError
from .explainers.base import ImportanceRanking
from .perturbation import PerturbationResult

DEFAULT_K = 10
DEFAULT_FLAT_THRESHOLD = 0.01
FLAG_FLAT = "static-important, dynamically flat"
FLAG_REVERSAL = "static-important, sign reversal"


def _shared(a: ImportanceRanking, b: ImportanceRanking) -> list[str]:
    bn = set(b.names)
    return sorted(n for n in a.names if n in bn)


def spearman_rank_correlation(a: ImportanceRanking, b: ImportanceRanking) -> float:
    """Spearman's rho over the features both rankings contain (average ranks for ties).

    Returns 0.0 when either side has all-equal scores, where rho is undefined.
    """
    shared = _shared(a, b)
    if len(shared) < 3:
        raise DataError(f"need at least 3 shared features, got {len(shared)}")
    sa, sb = a.scores, b.scores
    ra = rankdata([-sa[n] for n in shared])
    rb = rankdata([-sb[n] for n in shared])
    ra -= ra.mean()
    rb -= rb.mean()
    denom = np.sqrt((ra @ ra) * (rb @ rb))
    if denom == 0:
        return 0.0
    return float(np.clip((ra @ rb) / denom, -1.0, 1.0))


def top_k_overlap(a: ImportanceRanking, b: ImportanceRanking, k: int) -> float:
    """Jaccard index of the two top-``k`` feature sets."""
    if k < 1 or k > len(a) or k > len(b):
        raise DataError(f"k={k} exceeds ranking length ({len(a)}, {len(b)})")
    ta, tb = set(a.top(k)), set(b.top(k))
    return len(ta & tb) / len(ta | tb)


@dataclass(frozen=True)
class FeatureRow:
    feature: str
    static_rank: int
    dynamic_rank: int
    static_score: float
    sensitivity: float
    monotone: bool
    reversal_points: tuple[float, ...]
    flags: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "static_rank": self.static_rank,
            "dynamic_rank": self.dynamic_rank,
            "static_score": self.static_score,
            "sensitivity": self.sensitivity,
            "monotone": self.monotone,
            "reversal_points": list(self.reversal_points),
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class ConsistencyBlock:
    model: str
    technique: str
    compared_features: tuple[str, ...]
    spearman: float
    k: int
    top_k_overlap: float
    rows: tuple[FeatureRow, ...]
    verdict: str

    @property
    def flags(self) -> list[tuple[str, str]]:
        return [(r.feature, f) for r in self.rows for f in r.flags]

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "technique": self.technique,
            "compared_features": list(self.compared_features),
            "spearman": self.spearman,
            "k": self.k,
            "top_k_overlap": self.top_k_overlap,
            "features": [r.to_dict() for r in self.rows],
            "flags": [{"feature": f, "flag": fl} for f, fl in self.flags],
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class ConsistencyReport:
    blocks: tuple[ConsistencyBlock, ...]
    k: int = DEFAULT_K
    flat_threshold: float = DEFAULT_FLAT_THRESHOLD
    skipped: tuple[tuple[str, str, str], ...] = field(default=())

    def block(self, model: str, technique: str) -> ConsistencyBlock:
        for b in self.blocks:
            if b.model == model and b.technique == technique:
                return b
        raise KeyError((model, technique))

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "flat_threshold": self.flat_threshold,
            "blocks": [b.to_dict() for b in self.blocks],
            "skipped": [{"model": m, "technique": t, "reason": r} for m, t, r in self.skipped],
        }

    def to_markdown(self) -> str:
        lines = ["# Static vs dynamic feature importance", "",
                 f"top-k = {self.k}, flatness threshold = {self.flat_threshold}", "",
                 "| model | technique | spearman | top-k overlap | flags | verdict |",
                 "|---|---|---|---|---|---|"]
        for b in self.blocks:
            lines.append(f"| {b.model} | {b.technique} | {b.spearman:.3f} | {b.top_k_overlap:.3f} "
                         f"| {len(b.flags)} | {b.verdict} |")
        for b in self.blocks:
            if b.flags:
                lines += ["", f"## {b.model} / {b.technique}"]
                lines += [f"- `{f}`: {fl}" for f, fl in b.flags]
        if self.skipped:
            lines += ["", "## Skipped"]
            lines += [f"- {m} / {t}: {r}" for m, t, r in self.skipped]
        return "\n".join(lines) + "\n"


def _verdict(rho: float, n_flags: int) -> str:
    if rho >= 0.8 and n_flags == 0:
        return "consistent"
    if rho >= 0.5:
        return "partially consistent" + (f" ({n_flags} flagged)" if n_flags else "")
    return "discontinuous" + (f" ({n_flags} flagged)" if n_flags else "")


def compare(static: ImportanceRanking, dynamic: PerturbationResult, k: int = DEFAULT_K,
            flat_threshold: float = DEFAULT_FLAT_THRESHOLD) -> ConsistencyBlock:
    """Metrics and flags for one static ranking against one model's perturbation result."""
    dyn = dynamic.ranking
    shared = _shared(static, dyn)
    if len(shared) < 3:
        raise DataError(f"{static.model_kind}/{static.technique}: fewer than 3 shared features")
    s = static.restrict(shared)
    d = dyn.restrict(shared)
    rho = spearman_rank_correlation(s, d)
    k_eff = min(k, len(shared))
    overlap = top_k_overlap(s, d, k_eff)
    s_rank = {n: i + 1 for i, n in enumerate(s.names)}
    d_rank = {n: i + 1 for i, n in enumerate(d.names)}
    s_scores = s.scores
    top = set(s.top(k_eff))
    rows = []
    for name in s.names:
        sens = dynamic.score_of(name)
        flags = []
        if name in top and s_scores[name] > 0:
            if sens.score < flat_threshold:
                flags.append(FLAG_FLAT)
            if sens.reversal_points:
                flags.append(FLAG_REVERSAL)
        rows.append(FeatureRow(name, s_rank[name], d_rank[name], s_scores[name], sens.score,
                               sens.monotone, sens.reversal_points, tuple(flags)))
    n_flags = sum(len(r.flags) for r in rows)
    return ConsistencyBlock(static.model_kind, static.technique, tuple(shared), rho, k_eff, overlap,
                            tuple(rows), _verdict(rho, n_flags))


def build_consistency_report(static: Sequence[ImportanceRanking],
                             dynamic: Mapping[str, PerturbationResult] | PerturbationResult,
                             k: int = DEFAULT_K,
                             flat_threshold: float = DEFAULT_FLAT_THRESHOLD) -> ConsistencyReport:
    """Compare every static ranking with the perturbation result of its model.

    ``dynamic`` maps model kind to result; a single result is used for every
    ranking. Static rankings are restricted to the perturbed features. Pairs
    with fewer than 3 shared features are listed under ``skipped``; if no pair
    qualifies the call fails.
    """
    blocks, skipped = [], []
    for st in static:
        if isinstance(dynamic, PerturbationResult):
            dyn = dynamic
        elif st.model_kind in dynamic:
            dyn = dynamic[st.model_kind]
        else:
            skipped.append((st.model_kind, st.technique, "no perturbation result for model"))
            continue
        try:
            blocks.append(compare(st, dyn, k, flat_threshold))
        except DataError as exc:
            skipped.append((st.model_kind, st.technique, str(exc)))
    if not blocks:
        raise DataError("no static ranking shares at least 3 features with the dynamic ranking")
    return ConsistencyReport(tuple(blocks), k, flat_threshold, tuple(skipped))
