"""Run configuration: defaults, file loading, hashing and seed derivation."""
from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import ConfigError
from .models import MODEL_KINDS
from .perturbation import DEFAULT_MULTIPLIERS, DEFAULT_PROPORTIONS, DEFAULT_REPEATS, DEFAULT_REVERSAL_TOL

DEFAULTS: dict[str, Any] = {
    "seed": 0,
    "data": {
        "csv": None,
        "schema": None,
        "synthetic": None,
        "sample_size": 20000,
        "holdout_fraction": 0.2,
    },
    "models": {
        "enabled": list(MODEL_KINDS),
        "logistic": {"l2": 1e-4, "max_iters": 100, "tol": 1e-7},
        "random_forest": {"n_trees": 200, "max_depth": 12, "min_samples_leaf": 1,
                          "features_per_split": None},
        "gradient_boosting": {"n_stages": 200, "learning_rate": 0.1, "max_depth": 3},
        "mlp": {"layer_widths": [128, 64, 32, 16], "dropout_rate": 0.2, "epochs": 20,
                "batch_size": 256, "learning_rate": 1e-3},
    },
    "explain": {
        "n_explain": 50,
        "background_size": 100,
        "n_coalitions": "exact",
        "permutation_repeats": 5,
        "lime": {"n_instances": 20, "n_samples": 2000, "kernel_width": None, "ridge": 1e-3},
        "gam": {"K": 2, "subsample": 1000, "max_iters": 100},
    },
    "perturb": {
        "features": None,
        "multipliers": list(DEFAULT_MULTIPLIERS),
        "proportions": list(DEFAULT_PROPORTIONS),
        "repeats": DEFAULT_REPEATS,
        "reversal_tol": DEFAULT_REVERSAL_TOL,
    },
    "consistency": {"k": 10, "flat_threshold": 0.01},
}


def _merge(base: dict, override: Mapping, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key: {where}")
        if isinstance(base[key], dict) and isinstance(val, Mapping):
            out[key] = _merge(base[key], val, where)
        else:
            out[key] = copy.deepcopy(val)
    return out


def resolve_config(raw: Mapping | None = None) -> dict:
    """Defaults overlaid with ``raw``; unknown keys are rejected."""
    cfg = _merge(DEFAULTS, raw or {})
    enabled = cfg["models"]["enabled"]
    bad = [m for m in enabled if m not in MODEL_KINDS]
    if bad:
        raise ConfigError(f"unknown model kinds: {bad}")
    if cfg["data"]["csv"] and cfg["data"]["synthetic"]:
        raise ConfigError("set either data.csv or data.synthetic, not both")
    if not isinstance(cfg["seed"], int):
        raise ConfigError("seed must be an integer")
    return cfg


def load_config(path: str | Path | None) -> dict:
    if path is None:
        return resolve_config({})
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    try:
        raw = json.loads(text) if p.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse config {p}: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, Mapping):
        raise ConfigError("config root must be a mapping")
    cfg = resolve_config(raw)
    csv_path = cfg["data"]["csv"]
    if csv_path and not Path(csv_path).is_absolute():
        cfg["data"]["csv"] = str((p.parent / csv_path).resolve())
    return cfg


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def config_hash(cfg: Mapping) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"), allow_nan=False).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def derive_seed(master: int, name: str) -> int:
    """Stable per-module seed from the master seed."""
    digest = hashlib.sha256(f"{master}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1
