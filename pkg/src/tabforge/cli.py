"""Command-line entry point.

Each subcommand runs the pipeline up to its stage and writes results under
``--out``. Seed precedence: ``--seed`` flag, then ``TABFORGE_SEED``, then the
config file.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .config import REGIME_ALIASES, RunConfig, load_config
from .errors import ConfigError, StageError
from .pipeline import compare_regimes, run_pipeline
from .tuning import ResampleMode

SUBCOMMANDS = {
    "ingest": "ingest",
    "preprocess": "encode",
    "select-features": "select",
    "evaluate": "evaluate",
    "run-all": "evaluate",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tabforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*SUBCOMMANDS, "compare-regimes"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="INI run configuration")
        p.add_argument("--data", help="dataset CSV (overrides the config)")
        p.add_argument("--seed", type=int, help="master seed (overrides config and TABFORGE_SEED)")
        p.add_argument("--regime", choices=sorted(REGIME_ALIASES), help="evaluation regime")
        p.add_argument(
            "--resample", choices=["fold-safe", "pre-split", "none"], help="minority oversampling placement"
        )
        p.add_argument("--models", help="comma-separated model kinds")
        p.add_argument("--out", help="output directory")
        p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return parser


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    env_seed = environ.get("TABFORGE_SEED")
    if env_seed is not None:
        try:
            cfg.seed = int(env_seed)
        except ValueError:
            raise ConfigError(f"TABFORGE_SEED must be an integer, got {env_seed!r}") from None
    if args.seed is not None:
        cfg.seed = args.seed
    if args.data:
        cfg.data = args.data
    if args.out:
        cfg.out = args.out
    if args.regime:
        cfg.regime = REGIME_ALIASES[args.regime]
    if args.resample:
        cfg.resample = ResampleMode(args.resample.replace("-", "_"))
    if args.models:
        cfg.models = tuple(m.strip() for m in args.models.split(",") if m.strip())
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        cfg = resolve_config(args)
        if args.command == "compare-regimes":
            bundle = compare_regimes(cfg)
        else:
            bundle = run_pipeline(cfg, until=SUBCOMMANDS[args.command])
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    summary = {"out": bundle.out_dir, "files": sorted(bundle.files)}
    if bundle.tally is not None:
        summary["kept_features"] = bundle.tally.kept
    for regime, res in bundle.regimes.items():
        if isinstance(res, str):
            summary[regime] = f"failed: {res}"
            continue
        summary[regime] = {
            o.kind: (None if o.report is None else round(o.report.accuracy, 4)) for o in res.outcomes
        }
    print(json.dumps(summary, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
