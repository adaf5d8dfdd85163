"""Tabular data handling: schema, CSV ingestion, sampling, splitting, synthetic data.

Continuous columns are stored raw (never standardized) because perturbation
multipliers act on raw values. Categorical variables are expanded to one
column per level, named ``"<group>=<level>"``.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DataError

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"
GOOD, BAD = 1, 0
CLASS_NAMES = {GOOD: "good", BAD: "bad"}


def level_column(group: str, level: str) -> str:
    return f"{group}={level}"


@dataclass(frozen=True)
class Feature:
    name: str
    kind: str = CONTINUOUS
    group: str | None = None
    level: str | None = None


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered column layout shared by every matrix built from one data source."""

    features: tuple[Feature, ...]
    label_column: str = "loan_status"
    positive_label: str = "good"
    id_column: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise ConfigError("feature names must be unique")
        for f in self.features:
            if f.kind == CATEGORICAL:
                if f.group is None or f.level is None:
                    raise ConfigError(f"categorical column {f.name!r} needs group and level")
            elif f.kind != CONTINUOUS:
                raise ConfigError(f"unknown feature kind {f.kind!r}")
        for group, cols in self.groups.items():
            if len(cols) < 2:
                raise ConfigError(f"group {group!r} must have at least 2 levels")
            if group in names:
                raise ConfigError(f"group name {group!r} collides with a column name")

    @classmethod
    def from_columns(cls, continuous: Sequence[str] = (),
                     categorical: Mapping[str, Sequence[str]] | None = None,
                     **kwargs) -> "FeatureSchema":
        feats = [Feature(name) for name in continuous]
        for group, levels in (categorical or {}).items():
            if len(set(levels)) != len(levels):
                raise ConfigError(f"duplicate levels in group {group!r}")
            feats.extend(Feature(level_column(group, lv), CATEGORICAL, group, str(lv)) for lv in levels)
        return cls(tuple(feats), **kwargs)

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.features]

    @property
    def n_features(self) -> int:
        return len(self.features)

    @property
    def continuous_indices(self) -> list[int]:
        return [i for i, f in enumerate(self.features) if f.kind == CONTINUOUS]

    @property
    def continuous_names(self) -> list[str]:
        return [f.name for f in self.features if f.kind == CONTINUOUS]

    @property
    def groups(self) -> "OrderedDict[str, list[int]]":
        out: OrderedDict[str, list[int]] = OrderedDict()
        for i, f in enumerate(self.features):
            if f.kind == CATEGORICAL:
                out.setdefault(f.group, []).append(i)
        return out

    def levels(self, group: str) -> list[str]:
        if group not in self.groups:
            raise KeyError(f"unknown group {group!r}")
        return [self.features[i].level for i in self.groups[group]]

    @property
    def players(self) -> list[tuple[str, list[int]]]:
        """Attribution units: each continuous column alone, each one-hot group as a block."""
        out: list[tuple[str, list[int]]] = []
        seen = set()
        for i, f in enumerate(self.features):
            if f.kind == CONTINUOUS:
                out.append((f.name, [i]))
            elif f.group not in seen:
                seen.add(f.group)
                out.append((f.group, list(self.groups[f.group])))
        return out

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown feature {name!r}") from None

    def to_dict(self) -> dict:
        cats: dict[str, list[str]] = {g: self.levels(g) for g in self.groups}
        return {
            "continuous": self.continuous_names,
            "categorical": cats,
            "order": self.names,
            "label_column": self.label_column,
            "positive_label": self.positive_label,
            "id_column": self.id_column,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "FeatureSchema":
        by_name = {n: Feature(n) for n in d.get("continuous", [])}
        for group, levels in d.get("categorical", {}).items():
            for lv in levels:
                name = level_column(group, lv)
                by_name[name] = Feature(name, CATEGORICAL, group, str(lv))
        order = d.get("order") or list(by_name)
        return cls(tuple(by_name[n] for n in order),
                   label_column=d.get("label_column", "loan_status"),
                   positive_label=d.get("positive_label", "good"),
                   id_column=d.get("id_column"))

    def schema_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class LabelRule:
    """Maps raw status strings to good (1), bad (0) or drop."""

    good_statuses: frozenset
    bad_statuses: frozenset

    def __post_init__(self):
        object.__setattr__(self, "good_statuses", frozenset(self.good_statuses))
        object.__setattr__(self, "bad_statuses", frozenset(self.bad_statuses))
        overlap = self.good_statuses & self.bad_statuses
        if overlap:
            raise ConfigError(f"statuses both good and bad: {sorted(overlap)}")
        if not self.good_statuses or not self.bad_statuses:
            raise ConfigError("label rule needs at least one good and one bad status")

    def classify(self, status: str) -> int | None:
        status = status.strip()
        if status in self.good_statuses:
            return GOOD
        if status in self.bad_statuses:
            return BAD
        return None

    def to_dict(self) -> dict:
        return {"good": sorted(self.good_statuses), "bad": sorted(self.bad_statuses)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "LabelRule":
        return cls(frozenset(d["good"]), frozenset(d["bad"]))


# Public Lending Club loan_status vocabulary. Paid-off or current loans are good;
# charged-off, defaulted or delinquent loans are bad; anything else is dropped.
LENDING_CLUB_RULE = LabelRule(
    frozenset({
        "Fully Paid",
        "Current",
        "Does not meet the credit policy. Status:Fully Paid",
    }),
    frozenset({
        "Charged Off",
        "Default",
        "Late (31-120 days)",
        "Late (16-30 days)",
        "In Grace Period",
        "Does not meet the credit policy. Status:Charged Off",
    }),
)

LENDING_CLUB_CONTINUOUS = (
    "int_rate", "annual_inc", "total_pymnt", "last_pymnt_amnt", "installment", "loan_amnt",
)
LENDING_CLUB_CATEGORICAL = {"grade": None, "purpose": None}


@dataclass(frozen=True)
class SchemaConfig:
    """What to read from a CSV. Categorical levels of ``None`` are inferred from the file."""

    continuous: tuple[str, ...]
    categorical: Mapping[str, Sequence[str] | None]
    label_column: str = "loan_status"
    label_rule: LabelRule = LENDING_CLUB_RULE
    id_column: str | None = None

    @classmethod
    def lending_club(cls) -> "SchemaConfig":
        return cls(LENDING_CLUB_CONTINUOUS, dict(LENDING_CLUB_CATEGORICAL))

    @classmethod
    def from_dict(cls, d: Mapping) -> "SchemaConfig":
        try:
            rule = LabelRule.from_dict(d["label_rule"]) if "label_rule" in d else LENDING_CLUB_RULE
            return cls(
                tuple(d.get("continuous", ())),
                {g: (list(map(str, lv)) if lv is not None else None)
                 for g, lv in (d.get("categorical") or {}).items()},
                label_column=d.get("label_column", "loan_status"),
                label_rule=rule,
                id_column=d.get("id_column"),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad schema config: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "continuous": list(self.continuous),
            "categorical": {g: (list(v) if v is not None else None) for g, v in self.categorical.items()},
            "label_column": self.label_column,
            "label_rule": self.label_rule.to_dict(),
            "id_column": self.id_column,
        }


@dataclass
class LoadReport:
    raw: int = 0
    kept: int = 0
    dropped_parse: int = 0
    dropped_label: int = 0
    dropped_level: int = 0

    def to_dict(self) -> dict:
        return {
            "kept": self.kept,
            "dropped_parse": self.dropped_parse,
            "dropped_label": self.dropped_label,
            "dropped_level": self.dropped_level,
        }


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable design matrix with binary labels (1 = good, 0 = bad)."""

    schema: FeatureSchema
    X: np.ndarray
    y: np.ndarray
    row_ids: np.ndarray
    truth: Mapping | None = field(default=None, compare=False)
    load_report: LoadReport | None = field(default=None, compare=False)

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, order="C").reshape(-1, self.schema.n_features)
        y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        ids = np.asarray(self.row_ids, dtype=np.int64).reshape(-1)
        if not (X.shape[0] == y.shape[0] == ids.shape[0]):
            raise DataError("rows, labels and row_ids must have equal length")
        if y.size and not np.isin(y, (0, 1)).all():
            raise DataError("labels must be 0 or 1")
        if not np.isfinite(X).all():
            raise DataError("non-finite values in design matrix")
        check_one_hot(self.schema, X)
        for arr in (X, y, ids):
            arr.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "row_ids", ids)

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.schema, self.X[rows], self.y[rows], self.row_ids[rows], truth=self.truth)

    def equals(self, other: "Dataset") -> bool:
        # column layout and values; the schema's id_column is source metadata
        return (self.schema.features == other.schema.features
                and self.schema.label_column == other.schema.label_column
                and np.array_equal(self.X, other.X)
                and np.array_equal(self.y, other.y)
                and np.array_equal(self.row_ids, other.row_ids))

    def class_counts(self) -> dict[str, int]:
        return {CLASS_NAMES[c]: int((self.y == c).sum()) for c in (GOOD, BAD)}


def check_one_hot(schema: FeatureSchema, X: np.ndarray) -> None:
    for group, cols in schema.groups.items():
        block = X[:, cols]
        if not (np.isin(block, (0.0, 1.0)).all() and (block.sum(axis=1) == 1.0).all()):
            raise DataError(f"group {group!r} is not exactly one-hot in every row")


def encode_one_hot(values: Sequence[str], levels: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    """One column per level; returns ``(matrix, valid)``.

    Rows whose value is not in ``levels`` come back as all-zero with
    ``valid == False``; callers drop them.

    >>> m, ok = encode_one_hot(["A", "D", "A"], ["A", "B", "D"])
    >>> m.tolist()
    [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]
    """
    pos = {lv: j for j, lv in enumerate(levels)}
    out = np.zeros((len(values), len(levels)))
    valid = np.zeros(len(values), dtype=bool)
    for i, v in enumerate(values):
        j = pos.get(str(v).strip())
        if j is not None:
            out[i, j] = 1.0
            valid[i] = True
    return out, valid


def decode_one_hot(block: np.ndarray, levels: Sequence[str]) -> list[str]:
    block = np.asarray(block)
    if not (block.sum(axis=1) == 1).all():
        raise DataError("block is not exactly one-hot")
    return [levels[j] for j in block.argmax(axis=1)]


def _parse_number(text: str) -> float:
    t = text.strip()
    if t.endswith("%"):
        t = t[:-1].strip()
    val = float(t)  # ValueError on junk or empty
    if not math.isfinite(val):
        raise ValueError(text)
    return val


def load_csv(path, config: SchemaConfig) -> Dataset:
    """Read a CSV into a Dataset according to ``config``.

    Rows are dropped (never imputed) when a numeric cell fails to parse, the
    status is outside the label rule, or a categorical value is not a known
    level. Counts land in ``dataset.load_report``; ``kept`` plus the three drop
    counts always equals the number of data rows.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        needed = [*config.continuous, *config.categorical, config.label_column]
        if config.id_column:
            needed.append(config.id_column)
        missing = [c for c in needed if c not in header]
        if missing:
            raise DataError(f"missing column: {', '.join(missing)}")
        raw_rows = list(reader)

    report = LoadReport(raw=len(raw_rows))
    parsed = []
    for i, row in enumerate(raw_rows):
        label = config.label_rule.classify(row[config.label_column] or "")
        if label is None:
            report.dropped_label += 1
            continue
        try:
            nums = [_parse_number(row[c] or "") for c in config.continuous]
            rid = int(row[config.id_column]) if config.id_column else i
        except ValueError:
            report.dropped_parse += 1
            continue
        cats = {g: (row[g] or "").strip() for g in config.categorical}
        parsed.append((rid, nums, cats, label))

    levels: dict[str, list[str]] = {}
    for g, lv in config.categorical.items():
        if lv is None:
            # inferred from the rows that survived label/parse filtering
            lv = sorted({p[2][g] for p in parsed if p[2][g] != ""})
        levels[g] = [str(x) for x in lv]
    schema = FeatureSchema.from_columns(config.continuous, levels,
                                        label_column=config.label_column,
                                        id_column=config.id_column)

    n = len(parsed)
    keep = np.ones(n, dtype=bool)
    blocks = []
    for g in config.categorical:
        block, valid = encode_one_hot([p[2][g] for p in parsed], levels[g])
        keep &= valid
        blocks.append(block)
    report.dropped_level = int((~keep).sum())
    cont = np.array([p[1] for p in parsed], dtype=np.float64).reshape(n, len(config.continuous))
    X = np.hstack([cont, *blocks]) if blocks else cont
    X = X[keep]
    y = np.array([p[3] for p in parsed], dtype=np.int64)[keep]
    ids = np.array([p[0] for p in parsed], dtype=np.int64)[keep]
    report.kept = int(keep.sum())
    if report.kept == 0:
        raise DataError(f"no rows left after filtering {path}: {report.to_dict()}")
    # schema column order is continuous first, then groups in config order
    return Dataset(schema, X, y, ids, load_report=report)


def write_csv(ds: Dataset, path, good_status: str = "Fully Paid", bad_status: str = "Charged Off",
              id_column: str = "id") -> None:
    """Write ``ds`` as raw columns (one per categorical group) so ``load_csv`` can re-read it."""
    schema = ds.schema
    groups = schema.groups
    header = [id_column, *schema.continuous_names, *groups, schema.label_column]
    cont_idx = schema.continuous_indices
    decoded = {g: decode_one_hot(ds.X[:, cols], schema.levels(g)) if ds.n_rows else []
               for g, cols in groups.items()}
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(ds.n_rows):
            w.writerow([
                int(ds.row_ids[i]),
                *(repr(float(ds.X[i, j])) for j in cont_idx),
                *(decoded[g][i] for g in groups),
                good_status if ds.y[i] == GOOD else bad_status,
            ])


def balanced_sample(ds: Dataset, n: int, seed: int) -> Dataset:
    """Draw ``n / 2`` rows of each class without replacement."""
    if n <= 0 or n % 2:
        raise ConfigError(f"sample size must be a positive even number, got {n}")
    half = n // 2
    rng = np.random.default_rng(seed)
    picks = []
    for cls in (GOOD, BAD):
        members = np.flatnonzero(ds.y == cls)
        if members.size < half:
            raise DataError(f"class {CLASS_NAMES[cls]} has {members.size} < {half}")
        picks.append(rng.choice(members, size=half, replace=False))
    return ds.subset(np.sort(np.concatenate(picks)))


def train_holdout_split(ds: Dataset, holdout_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Stratified, seed-deterministic partition into (train, holdout)."""
    if not 0.0 < holdout_fraction < 1.0:
        raise ConfigError(f"holdout_fraction must be in (0, 1), got {holdout_fraction}")
    rng = np.random.default_rng(seed)
    hold = []
    for cls in (GOOD, BAD):
        members = np.flatnonzero(ds.y == cls)
        k = int(round(holdout_fraction * members.size))
        hold.append(rng.permutation(members)[:k])
    hold_idx = np.sort(np.concatenate(hold))
    mask = np.ones(ds.n_rows, dtype=bool)
    mask[hold_idx] = False
    return ds.subset(np.flatnonzero(mask)), ds.subset(hold_idx)


# --- synthetic data -------------------------------------------------------

_DISTS = ("uniform", "lognormal", "gamma")


@dataclass(frozen=True)
class ContinuousSpec:
    """Nonnegative-support generator for one continuous feature.

    ``uniform``: params ``low``, ``high`` (low >= 0). ``lognormal``: ``mean``,
    ``sigma`` of the underlying normal. ``gamma``: ``shape``, ``scale``.
    """

    name: str
    dist: str = "uniform"
    params: Mapping[str, float] = field(default_factory=lambda: {"low": 0.0, "high": 1.0})

    def validate(self):
        p = self.params
        if self.dist not in _DISTS:
            raise ConfigError(f"unknown distribution {self.dist!r} for {self.name}")
        if self.dist == "uniform":
            if p["low"] < 0:
                raise ConfigError(f"{self.name}: uniform support must be nonnegative")
            if not p["high"] > p["low"]:
                raise ConfigError(f"{self.name}: zero-variance uniform requested")
        elif self.dist == "lognormal" and not p["sigma"] > 0:
            raise ConfigError(f"{self.name}: zero-variance lognormal requested")
        elif self.dist == "gamma" and not (p["shape"] > 0 and p["scale"] > 0):
            raise ConfigError(f"{self.name}: gamma shape and scale must be positive")

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        p = self.params
        if self.dist == "uniform":
            return rng.uniform(p["low"], p["high"], size=n)
        if self.dist == "lognormal":
            return rng.lognormal(p["mean"], p["sigma"], size=n)
        return rng.gamma(p["shape"], p["scale"], size=n)


@dataclass(frozen=True)
class GroupSpec:
    name: str
    levels: tuple[str, ...]
    probs: tuple[float, ...]

    def validate(self):
        if len(self.levels) < 2 or len(self.levels) != len(self.probs):
            raise ConfigError(f"group {self.name}: need >= 2 levels with one probability each")
        if min(self.probs) < 0 or not math.isclose(sum(self.probs), 1.0, abs_tol=1e-9):
            raise ConfigError(f"group {self.name}: probabilities must be nonnegative and sum to 1")


@dataclass(frozen=True)
class SyntheticSpec:
    """Logistic ground truth: ``P(good) = sigmoid(weights . x + intercept)`` on raw features.

    ``weights`` is keyed by column name (``"group=level"`` for levels); absent
    columns get weight 0. After drawing, each label is flipped with
    probability ``noise``.
    """

    n_rows: int
    continuous: tuple[ContinuousSpec, ...] = ()
    groups: tuple[GroupSpec, ...] = ()
    weights: Mapping[str, float] = field(default_factory=dict)
    intercept: float = 0.0
    noise: float = 0.0

    def schema(self) -> FeatureSchema:
        return FeatureSchema.from_columns([c.name for c in self.continuous],
                                          {g.name: list(g.levels) for g in self.groups})

    def validate(self):
        if self.n_rows < 0:
            raise ConfigError("n_rows must be >= 0")
        if not 0.0 <= self.noise < 0.5:
            raise ConfigError("noise must be in [0, 0.5)")
        for c in self.continuous:
            c.validate()
        for g in self.groups:
            g.validate()
        unknown = set(self.weights) - set(self.schema().names)
        if unknown:
            raise ConfigError(f"weights for unknown columns: {sorted(unknown)}")

    def weight_vector(self) -> np.ndarray:
        return np.array([float(self.weights.get(n, 0.0)) for n in self.schema().names])

    @classmethod
    def from_dict(cls, d: Mapping) -> "SyntheticSpec":
        try:
            return cls(
                n_rows=int(d["n_rows"]),
                continuous=tuple(ContinuousSpec(c["name"], c.get("dist", "uniform"),
                                                dict(c.get("params", {"low": 0.0, "high": 1.0})))
                                 for c in d.get("continuous", [])),
                groups=tuple(GroupSpec(g["name"], tuple(map(str, g["levels"])),
                                       tuple(float(p) for p in g["probs"]))
                             for g in d.get("groups", [])),
                weights={k: float(v) for k, v in (d.get("weights") or {}).items()},
                intercept=float(d.get("intercept", 0.0)),
                noise=float(d.get("noise", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad synthetic spec: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "n_rows": self.n_rows,
            "continuous": [{"name": c.name, "dist": c.dist, "params": dict(c.params)} for c in self.continuous],
            "groups": [{"name": g.name, "levels": list(g.levels), "probs": list(g.probs)} for g in self.groups],
            "weights": dict(self.weights),
            "intercept": self.intercept,
            "noise": self.noise,
        }


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def generate_synthetic(spec: SyntheticSpec, seed: int) -> Dataset:
    """Draw a Dataset from ``spec``; the generating weights are kept in ``dataset.truth``."""
    spec.validate()
    schema = spec.schema()
    rng = np.random.default_rng(seed)
    n = spec.n_rows
    cols = [c.draw(rng, n) for c in spec.continuous]
    for g in spec.groups:
        picks = rng.choice(len(g.levels), size=n, p=np.asarray(g.probs))
        cols.extend((picks == j).astype(np.float64) for j in range(len(g.levels)))
    X = np.column_stack(cols) if cols else np.zeros((n, 0))
    X = X.reshape(n, schema.n_features)
    w = spec.weight_vector()
    p = sigmoid(X @ w + spec.intercept)
    y = (rng.random(n) < p).astype(np.int64)
    flip = rng.random(n) < spec.noise
    y = np.where(flip, 1 - y, y)
    truth = {"weights": dict(zip(schema.names, w.tolist())), "intercept": spec.intercept}
    return Dataset(schema, X, y, np.arange(n, dtype=np.int64), truth=truth)


def default_synthetic_spec(n_rows: int = 30000) -> SyntheticSpec:
    """Lending-Club-shaped synthetic credit data used by the CLI and tests.

    Weights are on raw feature scale and chosen so that the standardized
    effect order is int_rate > last_pymnt_amnt > total_pymnt > installment,
    with annual_inc weak and loan_amnt a pure dummy.
    """
    return SyntheticSpec(
        n_rows=n_rows,
        continuous=(
            ContinuousSpec("int_rate", "uniform", {"low": 5.0, "high": 25.0}),
            ContinuousSpec("annual_inc", "lognormal", {"mean": 11.0, "sigma": 0.5}),
            ContinuousSpec("total_pymnt", "gamma", {"shape": 4.0, "scale": 3000.0}),
            ContinuousSpec("last_pymnt_amnt", "gamma", {"shape": 2.0, "scale": 1500.0}),
            ContinuousSpec("installment", "uniform", {"low": 50.0, "high": 1200.0}),
            ContinuousSpec("loan_amnt", "uniform", {"low": 1000.0, "high": 35000.0}),
        ),
        groups=(
            GroupSpec("grade", ("A", "B", "C", "D"), (0.25, 0.35, 0.25, 0.15)),
            GroupSpec("purpose", ("credit_card", "debt_consolidation", "other"), (0.3, 0.5, 0.2)),
        ),
        weights={
            "int_rate": -0.35,
            "annual_inc": 2.0e-6,
            "total_pymnt": 1.2e-4,
            "last_pymnt_amnt": 5.0e-4,
            "installment": -1.2e-3,
            "grade=A": 0.6,
            "grade=D": -0.6,
            "purpose=credit_card": 0.1,
        },
        intercept=3.2,
        noise=0.02,
    )
