"""End-to-end orchestration: ingest, preprocess, select, split, evaluate, report."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import platform
import time
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .config import RunConfig
from .errors import StageError
from .featsel import (
    BeeColonyConfig,
    GbmSelectorConfig,
    SelectorVerdict,
    VoteTally,
    select_bee_colony,
    select_chi2,
    select_gbm_importance,
    select_l1_logistic,
    select_lasso,
    select_pearson,
    select_rf_importance,
    select_rfe,
    tally_votes,
)
from .preprocess import PreprocessReport, correlation_matrix, histogram, preprocess_table
from .table import STROKE_SCHEMA, EncodedMatrix, Table, label_encode, load_csv, load_schema, train_test_split
from .tuning import EvaluationRegime, RegimeResult, derive_seed, run_regime

logger = logging.getLogger(__name__)

STAGES = ("ingest", "preprocess", "encode", "select", "split", "evaluate", "report")
FAILED_MARKER = "FAILED"


def run_selectors(
    matrix: EncodedMatrix, selectors: Sequence[str], params: dict[str, dict[str, Any]], seed: int
) -> list[SelectorVerdict]:
    """Run the enabled selectors in canonical order with per-selector derived seeds."""
    p = {name: dict(params.get(name, {})) for name in selectors}
    runners: dict[str, Callable[[], SelectorVerdict]] = {
        "pearson": lambda: select_pearson(matrix, **p["pearson"]),
        "chi2": lambda: select_chi2(matrix, **p["chi2"]),
        "rfe": lambda: select_rfe(matrix, **p["rfe"]),
        "l1_logistic": lambda: select_l1_logistic(matrix, **p["l1_logistic"]),
        "rf_importance": lambda: select_rf_importance(
            matrix, **p["rf_importance"], seed=derive_seed(seed, "rf_importance")
        ),
        "gbm_importance": lambda: _gbm(matrix, p["gbm_importance"], derive_seed(seed, "gbm_importance")),
        "lasso": lambda: select_lasso(matrix, **p["lasso"]),
        "bee_colony": lambda: select_bee_colony(
            matrix, BeeColonyConfig(**p["bee_colony"], seed=derive_seed(seed, "bee_colony"))
        ),
    }
    return [runners[name]() for name in runners if name in selectors]


def _gbm(matrix: EncodedMatrix, params: dict[str, Any], seed: int) -> SelectorVerdict:
    params = dict(params)
    multiplier = params.pop("threshold_multiplier", 1.0)
    return select_gbm_importance(matrix, GbmSelectorConfig(**params), multiplier, seed=seed)


def emit_vote_table(tally: VoteTally, path: str | os.PathLike) -> str:
    """Write the tally as ``SL, Feature, <selector columns>, Total``; returns the path."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(tally.to_csv())
    return str(path)


def comparison_rows(results: dict[str, RegimeResult | str]) -> list[tuple[str, str, str, Any]]:
    """Long-format ``(model, regime, metric, value)`` rows; failed regimes yield none."""
    rows = []
    for regime, res in results.items():
        if isinstance(res, str):
            continue
        for o in res.outcomes:
            if o.report is None:
                continue
            for metric in ("accuracy", "precision", "recall", "f1", "roc_auc"):
                rows.append((o.kind, regime, metric, getattr(o.report, metric)))
    return rows


@dataclass
class ReportBundle:
    out_dir: str
    files: dict[str, str] = field(default_factory=dict)
    preprocess: PreprocessReport | None = None
    tally: VoteTally | None = None
    verdicts: list[SelectorVerdict] = field(default_factory=list)
    regimes: dict[str, RegimeResult | str] = field(default_factory=dict)
    provenance: dict[str, Any] = field(default_factory=dict)
    failed_stage: str | None = None

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def write(self, name: str, text: str) -> str:
        p = self.path(name)
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        self.files[name] = p
        return p


def _versions() -> dict[str, str]:
    import numba
    import scipy

    return {
        "tabforge": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }


class Pipeline:
    """Stage runner that records outputs into a :class:`ReportBundle`.

    Any stage error is wrapped in :class:`StageError`, a ``FAILED`` marker naming
    the stage and cause is written next to the partial outputs, and provenance
    is flushed before the error propagates.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        os.makedirs(config.out, exist_ok=True)
        self.bundle = ReportBundle(config.out)
        marker = os.path.join(config.out, FAILED_MARKER)
        if os.path.exists(marker):
            os.remove(marker)
        self.started = time.time()
        self.table: Table | None = None
        self.clean: Table | None = None
        self.matrix: EncodedMatrix | None = None
        self.selected: EncodedMatrix | None = None
        self.split = None

    def stage(self, name: str, fn: Callable[[], Any]) -> Any:
        logger.info("stage %s", name)
        try:
            return fn()
        except StageError:
            raise
        except Exception as exc:
            self.bundle.failed_stage = name
            with open(os.path.join(self.config.out, FAILED_MARKER), "w", encoding="utf-8") as fh:
                fh.write(f"stage: {name}\ncause: {type(exc).__name__}: {exc}\n")
            self.write_provenance(status="failed")
            raise StageError(name, exc) from exc

    # -- stages ------------------------------------------------------------------

    def ingest(self) -> Table:
        def run():
            schema = STROKE_SCHEMA if self.config.schema == "builtin" else load_schema(self.config.schema)
            self.table = load_csv(self.config.data, schema)
            summary = {
                "rows": self.table.n_rows,
                "columns": self.table.n_columns,
                "names": self.table.names,
                "nulls": {n: self.table.null_count(n) for n in self.table.names},
                "added_categories": {k: list(v) for k, v in self.table.added_categories.items()},
            }
            self.bundle.write("ingest.json", json.dumps(summary, indent=2))
            return self.table
        return self.stage("ingest", run)

    def preprocess(self) -> Table:
        def run():
            self.clean, report = preprocess_table(self.table)
            self.bundle.preprocess = report
            return self.clean
        return self.stage("preprocess", run)

    def encode(self) -> EncodedMatrix:
        def run():
            self.matrix = label_encode(self.clean)
            corr, degenerate = correlation_matrix(self.matrix)
            doc = {
                "report": json.loads(self.bundle.preprocess.to_json()),
                "encoding_map": self.matrix.encoding_map,
                "correlation": {
                    "columns": list(self.matrix.feature_names) + [self.clean.target_name()],
                    "matrix": corr.tolist(),
                    "degenerate": degenerate,
                },
            }
            self.bundle.write("preprocess.json", json.dumps(doc, indent=2))
            for column in self.clean.names:
                if column == "id":
                    continue
                self.bundle.write(f"hist_{column}.csv", histogram(self.clean, column).to_csv())
            return self.matrix
        return self.stage("encode", run)

    def select(self) -> EncodedMatrix:
        def run():
            cfg = self.config
            verdicts = run_selectors(self.matrix, cfg.selectors, cfg.selector_params, cfg.seed)
            tally = tally_votes(verdicts, cfg.min_votes)
            self.bundle.verdicts, self.bundle.tally = verdicts, tally
            self.bundle.files["votes.csv"] = emit_vote_table(tally, self.bundle.path("votes.csv"))
            self.bundle.write("votes.json", tally.to_json())
            self.bundle.write(
                "selectors.json", json.dumps([v.to_dict() for v in verdicts], indent=2)
            )
            if not tally.kept:
                raise ValueError(f"no feature reached min_votes={cfg.min_votes}")
            kept = [n for n in self.matrix.feature_names if n in set(tally.kept)]
            self.selected = self.matrix.select(kept)
            return self.selected
        return self.stage("select", run)

    def make_split(self):
        def run():
            self.split = train_test_split(self.selected, ratio=self.config.split_ratio, seed=self.config.seed)
            return self.split
        return self.stage("split", run)

    def evaluate(self, regime: EvaluationRegime | str, write_details: bool = True) -> RegimeResult:
        regime = EvaluationRegime(regime)

        def run():
            cfg = self.config
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", category=UserWarning)
                result = run_regime(
                    regime, self.selected, self.split, cfg.models,
                    grids=self._grids() if regime is EvaluationRegime.CV_WITH_GRID else None,
                    seed=cfg.seed, resample_mode=cfg.resample, k=cfg.k, defaults=cfg.params,
                )
            self.bundle.regimes[regime.value] = result
            self.bundle.write(f"metrics_{regime.value}.csv", result.to_csv())
            self.bundle.write(f"metrics_{regime.value}.json", json.dumps(result.to_dict(), indent=2, default=str))
            if write_details:
                for o in result.outcomes:
                    if o.roc is not None:
                        self.bundle.write(f"roc_{o.kind}.csv", o.roc.to_csv())
                    if o.grid is not None:
                        self.bundle.write(f"grid_{o.kind}.csv", o.grid.to_csv())
            return result
        return self.stage("evaluate", run)

    def _grids(self):
        from .tuning import reference_grids

        grids = reference_grids()
        grids.update(self.config.grid_overrides())
        return grids

    def write_provenance(self, status: str = "ok") -> dict[str, Any]:
        ended = time.time()
        prov = {
            "status": status,
            "failed_stage": self.bundle.failed_stage,
            "config_hash": self.config.hash(),
            "config": self.config.canonical(),
            "seed": self.config.seed,
            "versions": _versions(),
            "started": datetime.fromtimestamp(self.started, timezone.utc).isoformat(),
            "wall_clock_seconds": round(ended - self.started, 3),
            "files": sorted(self.bundle.files),
        }
        if self.split is not None:
            prov["split"] = {"train": len(self.split.train), "test": len(self.split.test)}
        self.bundle.provenance = prov
        path = os.path.join(self.config.out, "provenance.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(prov, indent=2, default=str))
        self.bundle.files["provenance.json"] = path
        return prov


def run_pipeline(config: RunConfig, until: str = "evaluate") -> ReportBundle:
    """Run the stages up to and including ``until`` (``ingest`` … ``evaluate``)."""
    config.validate()
    pipe = Pipeline(config)
    steps = [
        ("ingest", pipe.ingest),
        ("preprocess", pipe.preprocess),
        ("encode", pipe.encode),
        ("select", pipe.select),
        ("split", pipe.make_split),
        ("evaluate", lambda: pipe.evaluate(config.regime)),
    ]
    names = [n for n, _ in steps]
    if until not in names:
        raise ValueError(f"until must be one of {names}")
    for name, step in steps:
        step()
        if name == until:
            break
    pipe.write_provenance()
    return pipe.bundle


def compare_regimes(config: RunConfig) -> ReportBundle:
    """Run all three regimes on one shared selection, split and seed.

    Writes ``comparison.csv`` in long format ``(model, regime, metric, value)``.
    A regime that fails is reported in provenance and contributes no rows.
    """
    config.validate()
    pipe = Pipeline(config)
    pipe.ingest()
    pipe.preprocess()
    pipe.encode()
    pipe.select()
    pipe.make_split()
    failures: dict[str, str] = {}
    for regime in EvaluationRegime:
        try:
            pipe.evaluate(regime, write_details=regime is EvaluationRegime(config.regime))
        except StageError as exc:
            failures[regime.value] = str(exc.cause)
            pipe.bundle.regimes[regime.value] = str(exc.cause)
            os.remove(os.path.join(config.out, FAILED_MARKER))
            pipe.bundle.failed_stage = None
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "regime", "metric", "value"])
    for model, regime, metric, value in comparison_rows(pipe.bundle.regimes):
        writer.writerow([model, regime, metric, "" if value is None else repr(float(value))])
    pipe.bundle.write("comparison.csv", buf.getvalue())
    prov = pipe.write_provenance()
    if failures:
        prov["regime_failures"] = failures
        with open(os.path.join(config.out, "provenance.json"), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(prov, indent=2, default=str))
    return pipe.bundle
