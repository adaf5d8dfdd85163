from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..dataset import Dataset, FeatureSchema
from ..errors import DataError


@dataclass(frozen=True, eq=False)
class Attribution:
    """Signed per-column contributions for one instance."""

    instance_id: int
    names: tuple[str, ...]
    values: np.ndarray
    base_value: float
    technique: str
    prediction: float | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64).reshape(-1)
        if vals.shape[0] != len(self.names):
            raise DataError("attribution length does not match feature names")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "names", tuple(self.names))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values.tolist()))

    def to_dict(self) -> dict:
        return {
            "instance_id": int(self.instance_id),
            "technique": self.technique,
            "base_value": float(self.base_value),
            "prediction": None if self.prediction is None else float(self.prediction),
            "values": self.as_dict(),
        }


@dataclass(frozen=True, eq=False)
class ImportanceRanking:
    """Descending (feature, score) list; equal scores are ordered by feature name.

    ``raw`` keeps unfloored scores where a technique can produce negatives.
    """

    entries: tuple[tuple[str, float], ...]
    technique: str
    model_kind: str = ""
    raw: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def from_scores(cls, names: Sequence[str], scores, technique: str, model_kind: str = "",
                    raw: Mapping[str, float] | None = None) -> "ImportanceRanking":
        scores = np.asarray(scores, dtype=np.float64)
        if len(names) != scores.shape[0]:
            raise DataError("names and scores differ in length")
        if len(set(names)) != len(names):
            raise DataError("duplicate names in ranking")
        if (scores < 0).any() or not np.isfinite(scores).all():
            raise DataError("ranking scores must be finite and nonnegative")
        pairs = sorted(zip(names, scores.tolist()), key=lambda p: (-p[1], p[0]))
        return cls(tuple(pairs), technique, model_kind, dict(raw or {}))

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.entries]

    @property
    def scores(self) -> dict[str, float]:
        return dict(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def top(self, k: int) -> list[str]:
        return self.names[:k]

    def restrict(self, keep: Iterable[str]) -> "ImportanceRanking":
        keep = set(keep)
        sc = self.scores
        names = [n for n in self.names if n in keep]
        return ImportanceRanking.from_scores(names, [sc[n] for n in names], self.technique,
                                             self.model_kind,
                                             {k: v for k, v in self.raw.items() if k in keep})

    def to_dict(self) -> dict:
        d = {
            "technique": self.technique,
            "model": self.model_kind,
            "ranking": [{"feature": n, "score": s} for n, s in self.entries],
        }
        if self.raw:
            d["raw"] = {k: float(self.raw[k]) for k in sorted(self.raw)}
        return d

    def csv_rows(self) -> list[tuple]:
        return [(n, s, self.technique, self.model_kind) for n, s in self.entries]


@dataclass(frozen=True)
class TrainStats:
    """Training-set summary LIME samples from."""

    mean: np.ndarray
    std: np.ndarray
    level_freqs: Mapping[str, np.ndarray]

    @classmethod
    def from_dataset(cls, ds: Dataset) -> "TrainStats":
        mean = ds.X.mean(axis=0)
        std = ds.X.std(axis=0)
        std = np.where(std > 0, std, 1.0)
        freqs = {g: ds.X[:, cols].mean(axis=0) for g, cols in ds.schema.groups.items()}
        return cls(mean, std, freqs)


def check_width(schema: FeatureSchema, x: np.ndarray):
    if x.shape[-1] != schema.n_features:
        raise DataError(f"row width {x.shape[-1]} does not match schema width {schema.n_features}")
