"""What-if perturbation of a holdout set, one feature at a time.

All curves report the mean predicted ``P(good)`` over the holdout. The holdout
itself is never modified; every perturbation acts on a copy.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import CATEGORICAL, CONTINUOUS, Dataset, FeatureSchema, level_column
from .errors import ConfigError, DataError
from .explainers.base import ImportanceRanking
from .models import predict_proba

DEFAULT_MULTIPLIERS = tuple(round(0.5 + 0.1 * i, 10) for i in range(11))
DEFAULT_PROPORTIONS = tuple(round(0.05 * i, 10) for i in range(1, 21))
DEFAULT_REPEATS = 25
DEFAULT_REVERSAL_TOL = 0.005


@dataclass(frozen=True, eq=False)
class PerturbationCurve:
    feature: str
    kind: str
    grid: np.ndarray
    values: np.ndarray
    base_value: float
    model_kind: str = ""
    group: str | None = None
    level: str | None = None

    def __post_init__(self):
        grid = np.array(self.grid, dtype=np.float64)
        vals = np.array(self.values, dtype=np.float64)
        if grid.shape != vals.shape:
            raise DataError("grid and values differ in length")
        if grid.size > 1 and not (np.diff(grid) > 0).all():
            raise DataError("grid must be strictly increasing")
        if not ((vals > 0) & (vals < 1)).all():
            raise DataError("curve values must lie in (0, 1)")
        for arr in (grid, vals):
            arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", vals)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "kind": self.kind,
            "group": self.group,
            "level": self.level,
            "model": self.model_kind,
            "base_value": self.base_value,
            "grid": self.grid.tolist(),
            "values": self.values.tolist(),
        }

    def csv_rows(self) -> list[tuple]:
        return [(self.model_kind, self.feature, float(g), float(v), self.base_value)
                for g, v in zip(self.grid, self.values)]


@dataclass(frozen=True)
class SensitivityScore:
    feature: str
    score: float
    monotone: bool
    reversal_points: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {"feature": self.feature, "score": self.score, "monotone": self.monotone,
                "reversal_points": list(self.reversal_points)}


def _check_grid(grid, lo, hi, what) -> np.ndarray:
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1 or g.size == 0:
        raise ConfigError(f"{what} grid must be a nonempty list")
    if g.size > 1 and not (np.diff(g) > 0).all():
        raise ConfigError(f"{what} grid must be strictly increasing")
    if lo is not None and (g < lo).any() or hi is not None and (g > hi).any():
        raise ConfigError(f"{what} grid must lie within [{lo}, {hi}]")
    return g


def _mean_proba(model, X) -> float:
    return float(np.mean(predict_proba(model, X)))


def sweep_continuous(model, holdout: Dataset, feature: str,
                     multipliers: Sequence[float] = DEFAULT_MULTIPLIERS,
                     bounds: tuple[float, float] | None = (0.5, 1.5)) -> PerturbationCurve:
    """Scale one continuous column by each multiplier, all other columns fixed.

    Zero entries stay zero under scaling. A multiplier of exactly 1.0 yields
    the unperturbed mean.
    """
    schema = holdout.schema
    j = schema.index(feature)
    if schema.features[j].kind != CONTINUOUS:
        raise ConfigError(f"{feature!r} is categorical; use flip_categorical")
    lo, hi = bounds if bounds is not None else (None, None)
    grid = _check_grid(multipliers, lo, hi, "multiplier")
    base_X = holdout.X
    base = _mean_proba(model, base_X)
    values = []
    for m in grid:
        Xp = base_X.copy()
        Xp[:, j] = Xp[:, j] * m
        values.append(_mean_proba(model, Xp))
    return PerturbationCurve(feature, CONTINUOUS, grid, np.array(values), base, model.kind)


def flip_rows(X: np.ndarray, cols: Sequence[int], target: int, rows) -> np.ndarray:
    """Copy of ``X`` with ``rows`` switched to the ``target`` level of the group ``cols``."""
    Xp = np.array(X, dtype=np.float64, copy=True)
    rows = np.asarray(rows, dtype=np.int64)
    Xp[np.ix_(rows, list(cols))] = 0.0
    Xp[rows, target] = 1.0
    return Xp


def n_new_ones(p: float, n_ones: int) -> int:
    # the epsilon keeps e.g. 0.05 * 100 from rounding up to 6
    return int(math.ceil(p * n_ones - 1e-9))


def flip_selection(zero_rows: np.ndarray, k: int, seed: int, p: float, repeat: int) -> np.ndarray:
    """Rows to flip for one (proportion, repeat) draw; keyed so schedules are order-free."""
    rng = np.random.default_rng([seed, int(round(p * 1e9)), repeat])
    return zero_rows[np.sort(rng.choice(zero_rows.size, size=k, replace=False))]


def flip_categorical(model, holdout: Dataset, group: str, target_level: str,
                     proportions: Sequence[float] = DEFAULT_PROPORTIONS,
                     repeats: int = DEFAULT_REPEATS, seed: int = 0) -> PerturbationCurve:
    """Raise the count of ``target_level`` by ``p * n1`` randomly chosen rows.

    ``n1`` is the level's count in the unperturbed holdout. For each
    proportion ``p`` and each of ``repeats`` draws, ``ceil(p * n1)`` rows that
    are not at the level are moved to it (the rest of the group zeroed) and the
    mean prediction recorded; the curve value is the mean over draws. Every draw
    starts from the unperturbed holdout, so ``p = 1`` doubles the level count.
    When fewer rows are available than requested the draw is clamped with a
    warning.
    """
    schema = holdout.schema
    if group not in schema.groups:
        raise ConfigError(f"{group!r} is not a categorical group")
    cols = schema.groups[group]
    target = schema.index(level_column(group, target_level))
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    grid = _check_grid(proportions, 0.0, 1.0, "proportion")
    X = holdout.X
    n_ones = int((X[:, target] == 1.0).sum())
    if n_ones == 0:
        raise DataError(f"level absent from holdout: {level_column(group, target_level)}")
    zero_rows = np.flatnonzero(X[:, target] == 0.0)
    if zero_rows.size == 0:
        raise DataError(f"every holdout row already has {level_column(group, target_level)}")

    base_pred = predict_proba(model, X)
    base = float(np.mean(base_pred))
    # only flipped rows change, so predict each candidate row once in its flipped state
    flipped_pred = predict_proba(model, flip_rows(X[zero_rows], cols, target, np.arange(zero_rows.size)))
    pos_in_zero = np.full(X.shape[0], -1, dtype=np.int64)
    pos_in_zero[zero_rows] = np.arange(zero_rows.size)

    values = []
    clamped = False
    for p in grid:
        k = n_new_ones(float(p), n_ones)
        if k > zero_rows.size:
            k = zero_rows.size
            clamped = True
        if k == 0:
            values.append(base)
            continue
        draws = []
        for r in range(repeats):
            sel = flip_selection(zero_rows, k, seed, float(p), r)
            pred = base_pred.copy()
            pred[sel] = flipped_pred[pos_in_zero[sel]]
            draws.append(float(np.mean(pred)))
        values.append(float(np.mean(draws)))
    if clamped:
        warnings.warn(f"{level_column(group, target_level)}: not enough rows to add; clamped to "
                      f"{zero_rows.size}", RuntimeWarning, stacklevel=2)
    return PerturbationCurve(level_column(group, target_level), CATEGORICAL, grid, np.array(values),
                             base, model.kind, group, target_level)


def sensitivity_score(curve: PerturbationCurve, tol: float = DEFAULT_REVERSAL_TOL) -> SensitivityScore:
    """Range of the curve plus direction changes larger than ``tol``.

    A step whose absolute change is at most ``tol`` counts as flat. A reversal
    is recorded at the grid point that ends the first step moving against the
    previous non-flat direction.
    """
    v = curve.values
    score = float(v.max() - v.min()) if v.size else 0.0
    d = np.diff(v)
    reversals = []
    prev = 0
    for i, step in enumerate(d):
        s = 0 if abs(step) <= tol else (1 if step > 0 else -1)
        if s == 0:
            continue
        if prev != 0 and s != prev:
            reversals.append(float(curve.grid[i + 1]))
        prev = s
    return SensitivityScore(curve.feature, score, not reversals, tuple(reversals))


@dataclass(frozen=True)
class PerturbationConfig:
    multipliers: tuple[float, ...] = DEFAULT_MULTIPLIERS
    proportions: tuple[float, ...] = DEFAULT_PROPORTIONS
    repeats: int = DEFAULT_REPEATS
    reversal_tol: float = DEFAULT_REVERSAL_TOL
    bounds: tuple[float, float] | None = (0.5, 1.5)
    seed: int = 0


@dataclass(frozen=True, eq=False)
class PerturbationResult:
    curves: tuple[PerturbationCurve, ...]
    scores: tuple[SensitivityScore, ...]
    ranking: ImportanceRanking = field(default=None)

    def score_of(self, feature: str) -> SensitivityScore:
        for s in self.scores:
            if s.feature == feature:
                return s
        raise KeyError(feature)


def resolve_targets(schema: FeatureSchema, features: Sequence[str] | None) -> list[tuple[str, str | None]]:
    """Expand requested names into ``(column_or_group, level)`` pairs.

    ``None`` means every continuous column and every level of every group. A
    group name expands to all its levels; ``"group=level"`` selects one level.
    """
    if features is None:
        features = [*schema.continuous_names, *schema.groups]
    out = []
    for name in features:
        if name in schema.groups:
            out.extend((name, lv) for lv in schema.levels(name))
            continue
        f = schema.features[schema.index(name)]
        out.append((f.group, f.level) if f.kind == CATEGORICAL else (name, None))
    if not out:
        raise ConfigError("no perturbable features requested")
    return out


def run_perturbations(model, holdout: Dataset, features: Sequence[str] | None = None,
                      config: PerturbationConfig = PerturbationConfig()) -> PerturbationResult:
    curves = []
    for name, level in resolve_targets(holdout.schema, features):
        if level is None:
            curves.append(sweep_continuous(model, holdout, name, config.multipliers, config.bounds))
        else:
            curves.append(flip_categorical(model, holdout, name, level, config.proportions,
                                           config.repeats, config.seed))
    scores = tuple(sensitivity_score(c, config.reversal_tol) for c in curves)
    ranking = ImportanceRanking.from_scores([s.feature for s in scores], [s.score for s in scores],
                                            "dynamic", model.kind)
    return PerturbationResult(tuple(curves), scores, ranking)


def dynamic_importance(model, holdout: Dataset, features: Sequence[str] | None = None,
                       config: PerturbationConfig = PerturbationConfig()) -> ImportanceRanking:
    """Rank features by the range of their perturbation curves."""
    return run_perturbations(model, holdout, features, config).ranking
