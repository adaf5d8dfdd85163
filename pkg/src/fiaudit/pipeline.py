"""End-to-end stages used by the CLI: data -> train -> explain -> perturb -> report.

Each stage writes plain JSON/CSV into an output directory. Every file embeds
the config hash and master seed, and JSON is written with sorted keys so that
identical inputs give byte-identical output trees.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .config import canonical_json, config_hash, derive_seed
from .consistency import build_consistency_report
from .dataset import (Dataset, SchemaConfig, SyntheticSpec, balanced_sample, default_synthetic_spec,
                      generate_synthetic, load_csv, train_holdout_split)
from .errors import ConfigError, DataError
from .explainers import (EXACT, ImportanceRanking, TrainStats, gam_by_label, gam_cluster,
                         gam_label_result, global_importance_from_attributions, impurity_importance,
                         kernel_shap, lime_explain, logit_coefficient_importance,
                         permutation_importance)
from .explainers.shapley import MAX_EXACT_PLAYERS
from .models import TRAINERS, evaluate_accuracy, model_from_dict, model_to_dict
from .perturbation import PerturbationConfig, PerturbationResult, run_perturbations

log = logging.getLogger("fiaudit")

SCHEMA_VERSION = "1.0"


@dataclass(frozen=True, eq=False)
class Prepared:
    full: Dataset
    train: Dataset
    holdout: Dataset


class Run:
    """Resolved config plus output directory and seed bookkeeping."""

    def __init__(self, cfg: Mapping, out_dir: str | Path):
        self.cfg = cfg
        self.out = Path(out_dir)
        self.hash = config_hash(cfg)
        self.seed = int(cfg["seed"])

    def sub_seed(self, name: str) -> int:
        return derive_seed(self.seed, name)

    @property
    def meta(self) -> dict:
        return {"config_hash": self.hash, "master_seed": self.seed, "schema_version": SCHEMA_VERSION}

    def write_json(self, rel: str, payload: Mapping) -> Path:
        path = self.out / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(canonical_json({"meta": self.meta, **payload}), encoding="utf-8")
        return path

    def read_json(self, rel: str) -> dict:
        path = self.out / rel
        if not path.exists():
            raise DataError(f"missing {path}; run the earlier stage first")
        doc = json.loads(path.read_text(encoding="utf-8"))
        if doc.get("meta", {}).get("config_hash") != self.hash:
            raise DataError(f"{path} was produced with a different config")
        return doc

    def write_csv(self, rel: str, header: list[str], rows) -> Path:
        path = self.out / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([*header, "config_hash", "master_seed"])
        for r in rows:
            w.writerow([*(repr(x) if isinstance(x, float) else x for x in r), self.hash, self.seed])
        path.write_text(buf.getvalue(), encoding="utf-8")
        return path


# --- data -----------------------------------------------------------------

def synthetic_spec(cfg: Mapping) -> SyntheticSpec:
    spec = cfg["data"]["synthetic"]
    if spec in (None, "default"):
        return default_synthetic_spec()
    if isinstance(spec, Mapping) and set(spec) == {"n_rows"}:
        return default_synthetic_spec(int(spec["n_rows"]))
    return SyntheticSpec.from_dict(spec)


def load_source(run: Run) -> Dataset:
    data = run.cfg["data"]
    if data["csv"]:
        schema_cfg = SchemaConfig.from_dict(data["schema"]) if data["schema"] else SchemaConfig.lending_club()
        ds = load_csv(data["csv"], schema_cfg)
        log.info("loaded %s: %s", data["csv"], ds.load_report.to_dict())
        return ds
    return generate_synthetic(synthetic_spec(run.cfg), run.sub_seed("synthetic"))


def prepare_data(run: Run) -> Prepared:
    full = load_source(run)
    data = run.cfg["data"]
    n = int(data["sample_size"])
    sampled = balanced_sample(full, n, run.sub_seed("sample")) if n else full
    train, holdout = train_holdout_split(sampled, float(data["holdout_fraction"]), run.sub_seed("split"))
    return Prepared(full, train, holdout)


def write_data_summary(run: Run, prep: Prepared) -> None:
    payload: dict[str, Any] = {
        "schema": prep.full.schema.to_dict(),
        "rows": {"source": prep.full.n_rows, "train": prep.train.n_rows, "holdout": prep.holdout.n_rows},
        "class_counts": {"train": prep.train.class_counts(), "holdout": prep.holdout.class_counts()},
    }
    if prep.full.load_report is not None:
        payload["load_report"] = prep.full.load_report.to_dict()
    if prep.full.truth is not None:
        payload["truth"] = prep.full.truth
    run.write_json("data_summary.json", payload)


# --- train ----------------------------------------------------------------

def enabled_models(run: Run) -> list[str]:
    enabled = list(run.cfg["models"]["enabled"])
    if not enabled:
        raise ConfigError("no models enabled")
    return enabled


def train_models(run: Run, prep: Prepared) -> dict[str, Any]:
    models = {}
    rows = []
    for kind in enabled_models(run):
        params = dict(run.cfg["models"][kind])
        if kind == "mlp":
            params["layer_widths"] = tuple(params["layer_widths"])
        log.info("training %s", kind)
        model = TRAINERS[kind](prep.train, seed=run.sub_seed(f"model:{kind}"), **params)
        models[kind] = model
        acc = evaluate_accuracy(model, prep.holdout)
        rows.append((kind, float(acc.accuracy), acc.tp, acc.fp, acc.tn, acc.fn))
        run.write_json(f"models/{kind}.json", model_to_dict(model))
    run.write_csv("accuracy.csv", ["model", "accuracy", "tp", "fp", "tn", "fn"], rows)
    write_data_summary(run, prep)
    return models


def load_models(run: Run) -> dict[str, Any]:
    models = {}
    for kind in enabled_models(run):
        doc = run.read_json(f"models/{kind}.json")
        doc.pop("meta")
        models[kind] = model_from_dict(doc)
    return models


# --- explain --------------------------------------------------------------

def _rankings_from_doc(doc: Mapping) -> list[ImportanceRanking]:
    out = []
    for r in doc["rankings"]:
        names = [e["feature"] for e in r["ranking"]]
        scores = [e["score"] for e in r["ranking"]]
        out.append(ImportanceRanking.from_scores(names, scores, r["technique"], r["model"], r.get("raw")))
    return out


def explain_models(run: Run, prep: Prepared, models: Mapping[str, Any]) -> list[ImportanceRanking]:
    ecfg = run.cfg["explain"]
    bg = balanced_sample(prep.train, int(ecfg["background_size"]), run.sub_seed("background"))
    explain_set = balanced_sample(prep.train, int(ecfg["n_explain"]), run.sub_seed("explain_rows"))
    stats = TrainStats.from_dataset(prep.train)
    n_players = len(prep.train.schema.players)
    n_coal = ecfg["n_coalitions"]
    if n_coal == EXACT and n_players > MAX_EXACT_PLAYERS:
        n_coal = 2048
        log.info("%d players: switching kernel SHAP to 2048 sampled coalitions", n_players)

    rankings: list[ImportanceRanking] = []
    attributions_doc: dict[str, Any] = {}
    gam_doc: dict[str, Any] = {}
    for kind, model in models.items():
        log.info("explaining %s", kind)
        shap_seed = run.sub_seed(f"shap:{kind}")
        shap = [kernel_shap(model, explain_set.X[i], bg, n_coal, shap_seed,
                            instance_id=int(explain_set.row_ids[i]))
                for i in range(explain_set.n_rows)]
        rankings.append(global_importance_from_attributions(shap, "sum_abs_shap", kind))
        if kind == "logistic":
            rankings.append(logit_coefficient_importance(model))
        if getattr(model, "trees", None):
            rankings.append(impurity_importance(model))
        else:
            log.info("%s: impurity importance skipped (not a tree model)", kind)
        rankings.append(permutation_importance(model, prep.holdout, int(ecfg["permutation_repeats"]),
                                               run.sub_seed(f"permutation:{kind}")))

        gcfg = ecfg["gam"]
        good, bad = gam_by_label(shap, explain_set.y, gcfg["subsample"], run.sub_seed(f"gam:{kind}"), kind)
        rankings += [good, bad]
        unsup = gam_cluster(shap, int(gcfg["K"]), int(gcfg["max_iters"]), run.sub_seed(f"gam:{kind}"))
        gam_doc[kind] = {"label_forced": gam_label_result(shap, explain_set.y).to_dict(),
                         "unsupervised": unsup.to_dict()}

        lcfg = ecfg["lime"]
        lime_seed = run.sub_seed(f"lime:{kind}")
        n_lime = min(int(lcfg["n_instances"]), explain_set.n_rows)
        lime = [lime_explain(model, explain_set.X[i], stats, int(lcfg["n_samples"]), lcfg["kernel_width"],
                             float(lcfg["ridge"]), lime_seed, instance_id=int(explain_set.row_ids[i]))
                for i in range(n_lime)]
        attributions_doc[kind] = {"shap": [a.to_dict() for a in shap], "lime": [a.to_dict() for a in lime]}

    run.write_json("attributions.json", {"attributions": attributions_doc})
    run.write_json("gam.json", {"gam": gam_doc})
    run.write_json("rankings.json", {"rankings": [r.to_dict() for r in rankings]})
    run.write_csv("rankings.csv", ["feature", "score", "technique", "model"],
                  [row for r in rankings for row in r.csv_rows()])
    return rankings


def load_rankings(run: Run) -> list[ImportanceRanking]:
    return _rankings_from_doc(run.read_json("rankings.json"))


# --- perturb --------------------------------------------------------------

def perturbation_config(run: Run) -> PerturbationConfig:
    p = run.cfg["perturb"]
    return PerturbationConfig(tuple(p["multipliers"]), tuple(p["proportions"]), int(p["repeats"]),
                              float(p["reversal_tol"]), (0.5, 1.5), run.sub_seed("perturb"))


def perturb_models(run: Run, prep: Prepared, models: Mapping[str, Any]) -> dict[str, PerturbationResult]:
    pcfg = perturbation_config(run)
    results = {}
    for kind, model in models.items():
        log.info("perturbing %s", kind)
        results[kind] = run_perturbations(model, prep.holdout, run.cfg["perturb"]["features"], pcfg)
    run.write_json("perturbation.json", {
        "perturbation": {
            kind: {
                "curves": [c.to_dict() for c in res.curves],
                "sensitivity": [s.to_dict() for s in res.scores],
                "ranking": res.ranking.to_dict(),
            }
            for kind, res in results.items()
        }
    })
    run.write_csv("curves.csv", ["model", "feature", "grid", "value", "base"],
                  [row for res in results.values() for c in res.curves for row in c.csv_rows()])
    return results


def load_perturbations(run: Run) -> dict[str, PerturbationResult]:
    from .perturbation import PerturbationCurve, SensitivityScore

    doc = run.read_json("perturbation.json")["perturbation"]
    out = {}
    for kind, d in doc.items():
        curves = tuple(PerturbationCurve(c["feature"], c["kind"], c["grid"], c["values"], c["base_value"],
                                         c["model"], c["group"], c["level"]) for c in d["curves"])
        scores = tuple(SensitivityScore(s["feature"], s["score"], s["monotone"], tuple(s["reversal_points"]))
                       for s in d["sensitivity"])
        ranking = _rankings_from_doc({"rankings": [d["ranking"]]})[0]
        out[kind] = PerturbationResult(curves, scores, ranking)
    return out


# --- report ---------------------------------------------------------------

def build_report(run: Run, rankings, perturbations) -> dict:
    ccfg = run.cfg["consistency"]
    report = build_consistency_report(rankings, perturbations, int(ccfg["k"]), float(ccfg["flat_threshold"]))
    accuracy = []
    acc_path = run.out / "accuracy.csv"
    if acc_path.exists():
        with acc_path.open(encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                accuracy.append({"model": row["model"], "accuracy": float(row["accuracy"])})
    payload = {"accuracy": accuracy, "consistency": report.to_dict()}
    run.write_json("report.json", payload)
    md = report.to_markdown()
    md += f"\nconfig_hash: `{run.hash}`, master_seed: `{run.seed}`\n"
    (run.out / "report.md").write_text(md, encoding="utf-8")
    return {"meta": run.meta, **payload}
