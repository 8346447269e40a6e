"""The three evaluation protocols: tuned CV, untuned CV and a single untuned fit."""

from __future__ import annotations

import csv
import io
import logging
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from ..table import EncodedMatrix, SplitIndices, oversample_minority, train_test_split
from .cv import CVResult, ResampleMode, cross_val_accuracy, kfold_plan
from .grid import TUNING_BASE, GridResult, GridSpec, grid_search, reference_grids
from .metrics import MetricsReport, RocCurve, confusion, metrics, roc_auc, roc_curve
from .seeds import derive_seed

logger = logging.getLogger(__name__)

LEAKAGE_WARNING = (
    "pre_split resampling duplicates minority rows before the train/test split; "
    "copies of training rows reach the test set, so test metrics are optimistic"
)

METRIC_COLUMNS = ("accuracy", "precision", "recall", "f1", "roc_auc")


class EvaluationRegime(str, Enum):
    CV_WITH_GRID = "cv_with_grid"
    NO_CV_NO_GRID = "no_cv_no_grid"
    CV_WITHOUT_GRID = "cv_without_grid"


@dataclass
class ModelOutcome:
    kind: str
    params: dict[str, Any] | None = None
    report: MetricsReport | None = None
    roc: RocCurve | None = None
    cv: CVResult | None = None
    grid: GridResult | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.kind,
            "params": self.params,
            "metrics": None if self.report is None else self.report.to_dict(),
            "cv": None if self.cv is None else {
                "fold_accuracies": self.cv.fold_accuracies,
                "mean": None if np.isnan(self.cv.mean) else self.cv.mean,
            },
            "grid": None if self.grid is None else self.grid.to_dict(),
            "error": self.error,
        }


@dataclass
class RegimeResult:
    regime: EvaluationRegime
    resample_mode: ResampleMode
    outcomes: list[ModelOutcome]
    defaults: dict[str, dict[str, Any]]
    notes: list[str] = field(default_factory=list)
    n_train: int = 0
    n_test: int = 0

    def outcome(self, kind: str) -> ModelOutcome:
        for o in self.outcomes:
            if o.kind == kind:
                return o
        raise KeyError(kind)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["model", *METRIC_COLUMNS, "status"])
        for o in self.outcomes:
            if o.report is None:
                writer.writerow([o.kind, *([""] * len(METRIC_COLUMNS)), f"failed: {o.error}"])
                continue
            values = [getattr(o.report, c) for c in METRIC_COLUMNS]
            writer.writerow([o.kind, *("" if v is None else repr(float(v)) for v in values), "ok"])
        return buf.getvalue()

    def to_dict(self) -> dict[str, Any]:
        return {
            "regime": self.regime.value,
            "resample_mode": self.resample_mode.value,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "defaults": self.defaults,
            "notes": self.notes,
            "models": [o.to_dict() for o in self.outcomes],
        }


def _evaluate(model, X_test, y_test) -> tuple[MetricsReport, RocCurve | None]:
    from ..models import predict_score

    scores = predict_score(model, X_test)
    pred = (scores >= 0.5).astype(np.int64)
    cm = confusion(y_test, pred)
    auc, curve = None, None
    if 0 < y_test.sum() < len(y_test):
        auc = roc_auc(y_test, scores)
        curve = roc_curve(y_test, scores)
    return metrics(cm, auc), curve


def run_regime(
    regime: EvaluationRegime | str,
    matrix: EncodedMatrix,
    split: SplitIndices,
    kinds: Sequence[str],
    grids: dict[str, GridSpec] | None = None,
    seed: int = 0,
    resample_mode: ResampleMode | str = ResampleMode.FOLD_SAFE,
    k: int = 5,
    defaults: dict[str, dict[str, Any]] | None = None,
) -> RegimeResult:
    """Train and test every model kind under one protocol.

    ``cv_with_grid`` grid-searches on the training rows and refits the best cell;
    ``cv_without_grid`` cross-validates the default parameters for reporting and
    refits them; ``no_cv_no_grid`` fits the defaults once. The test rows are
    never resampled, except that ``pre_split`` balances the whole matrix and
    re-splits it (with a leakage warning). A model that fails becomes a marked
    row rather than aborting the run.
    """
    from ..models import default_params, estimator_class, fit

    regime = EvaluationRegime(regime)
    mode = ResampleMode(resample_mode)
    notes: list[str] = []

    if mode is ResampleMode.PRE_SPLIT:
        warnings.warn(LEAKAGE_WARNING, stacklevel=2)
        notes.append(LEAKAGE_WARNING)
        X_all, y_all = oversample_minority(
            matrix.features, matrix.target, seed=derive_seed(seed, "pre_split")
        )
        balanced = EncodedMatrix(X_all, y_all, matrix.feature_names, matrix.encoding_map)
        split = train_test_split(y_all, ratio=split.ratio, seed=split.seed)
        source = balanced
    else:
        source = matrix
    train = source.take(split.train)
    test = source.take(split.test)

    def training_data():
        if mode is ResampleMode.FOLD_SAFE:
            return oversample_minority(train.features, train.target, seed=derive_seed(seed, "refit"))
        return train.features, train.target

    needs_cv = regime is not EvaluationRegime.NO_CV_NO_GRID
    plan = kfold_plan(train.target, k=k, seed=derive_seed(seed, "folds")) if needs_cv else None
    if grids is None and regime is EvaluationRegime.CV_WITH_GRID:
        grids = reference_grids()
    resolved: dict[str, dict[str, Any]] = {}
    outcomes: list[ModelOutcome] = []
    for kind in kinds:
        kind = estimator_class(kind).kind
        base = dict(default_params(kind))
        if regime is EvaluationRegime.CV_WITH_GRID:
            base.update(TUNING_BASE.get(kind, {}))
        base.update((defaults or {}).get(kind, {}))
        resolved[kind] = base
        out = ModelOutcome(kind)
        try:
            if regime is EvaluationRegime.CV_WITH_GRID:
                out.grid = grid_search(
                    kind, grids[kind], train, plan, mode, seed=derive_seed(seed, kind), base=base
                )
                params = {**base, **out.grid.best_params}
                out.cv = out.grid.cells[out.grid.best_index].cv
            elif regime is EvaluationRegime.CV_WITHOUT_GRID:
                params = base
                out.cv = cross_val_accuracy(kind, params, train, plan, mode, seed=derive_seed(seed, kind))
            else:
                params = base
            out.params = params
            X_fit, y_fit = training_data()
            model = fit(kind, (X_fit, y_fit), params, seed=derive_seed(seed, kind, "refit"))
            out.report, out.roc = _evaluate(model, test.features, test.target)
        except Exception as exc:  # recorded as a failed row
            out.error = f"{type(exc).__name__}: {exc}"
            logger.warning("%s failed under %s: %s", kind, regime.value, out.error)
        outcomes.append(out)
    return RegimeResult(regime, mode, outcomes, resolved, notes, len(split.train), len(split.test))
