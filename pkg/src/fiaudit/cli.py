"""Command-line entry point: ``fiaudit <command> [options]``."""
from __future__ import annotations

import argparse
import logging
import sys
import warnings

from . import pipeline
from .config import load_config, resolve_config
from .dataset import generate_synthetic, write_csv
from .errors import ConfigError, FiauditError
from .models import MODEL_KINDS

COMMANDS = ("train", "explain", "perturb", "audit", "gen-synth", "report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fiaudit",
        description="Compare static feature-importance rankings with what-if perturbation "
                    "sensitivity for credit-risk classifiers.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "train": "load data, train the enabled models, write models/ and accuracy.csv",
        "explain": "compute static rankings for trained models",
        "perturb": "run perturbation sweeps for trained models",
        "audit": "train, explain, perturb and report in one go",
        "gen-synth": "write a synthetic dataset as CSV with its ground truth",
        "report": "build the consistency report from earlier stage outputs",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", metavar="PATH", help="YAML or JSON run config")
        p.add_argument("--seed", type=int, help="master seed (overrides the config)")
        p.add_argument("--out", metavar="DIR", default="runs/latest", help="output directory")
        p.add_argument("--models", metavar="LIST",
                       help=f"comma-separated subset of {','.join(MODEL_KINDS)}")
        p.add_argument("--quiet", action="store_true", help="only print errors")
    return parser


def _config_from_args(args) -> dict:
    cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.models is not None:
        names = [m.strip() for m in args.models.split(",") if m.strip()]
        overrides["models"] = {"enabled": names}
    if overrides:
        # re-resolve so overrides go through the same validation
        merged = dict(cfg)
        merged["seed"] = overrides.get("seed", cfg["seed"])
        if "models" in overrides:
            merged["models"] = {**cfg["models"], **overrides["models"]}
        cfg = resolve_config(merged)
    return cfg


def _gen_synth(run: pipeline.Run) -> None:
    if run.cfg["data"]["csv"]:
        raise ConfigError("gen-synth needs a synthetic data config, not data.csv")
    spec = pipeline.synthetic_spec(run.cfg)
    ds = generate_synthetic(spec, run.sub_seed("synthetic"))
    run.out.mkdir(parents=True, exist_ok=True)
    write_csv(ds, run.out / "synthetic.csv")
    run.write_json("synthetic_truth.json", {"spec": spec.to_dict(), "truth": ds.truth,
                                            "class_counts": ds.class_counts()})


def run_command(command: str, cfg: dict, out_dir: str) -> None:
    run = pipeline.Run(cfg, out_dir)
    if command == "gen-synth":
        _gen_synth(run)
        return
    if command == "report":
        pipeline.build_report(run, pipeline.load_rankings(run), pipeline.load_perturbations(run))
        return
    pipeline.enabled_models(run)
    prep = pipeline.prepare_data(run)
    if command in ("train", "audit"):
        models = pipeline.train_models(run, prep)
    else:
        models = pipeline.load_models(run)
    if command in ("explain", "audit"):
        rankings = pipeline.explain_models(run, prep, models)
    if command in ("perturb", "audit"):
        perturbations = pipeline.perturb_models(run, prep, models)
    if command == "audit":
        pipeline.build_report(run, rankings, perturbations)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s",
                        stream=sys.stderr)
    log = logging.getLogger("fiaudit")
    log.setLevel(logging.ERROR if args.quiet else logging.INFO)
    with warnings.catch_warnings():
        if args.quiet:
            warnings.simplefilter("ignore")
        try:
            cfg = _config_from_args(args)
            run_command(args.command, cfg, args.out)
        except FiauditError as exc:
            print(f"fiaudit: error: {exc}", file=sys.stderr)
            return exc.exit_code
    if not args.quiet:
        print(f"wrote {args.out} (config_hash {pipeline.Run(cfg, args.out).hash})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
