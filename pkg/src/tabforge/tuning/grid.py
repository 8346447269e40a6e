"""Exhaustive hyperparameter grids with cross-validated selection."""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np

from ..errors import AllCellsFailed, InvalidParam
from ..table import EncodedMatrix
from .cv import CVResult, FoldPlan, ResampleMode, cross_val_accuracy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridSpec:
    """Per-parameter candidate values for one model kind.

    Cells are enumerated with keys in sorted order and each key's values in the
    order listed; that order decides ties.
    """

    kind: str
    values: dict[str, tuple]

    def __post_init__(self):
        from ..models import estimator_class

        cls = estimator_class(self.kind)
        object.__setattr__(self, "kind", cls.kind)
        values = {k: tuple(v) for k, v in self.values.items()}
        for name, options in values.items():
            if not options:
                raise InvalidParam(name, [], "a non-empty list of values")
            for v in options:
                cls.validate({name: v})
        object.__setattr__(self, "values", values)

    @property
    def keys(self) -> list[str]:
        return sorted(self.values)

    def cells(self) -> Iterator[dict[str, Any]]:
        keys = self.keys
        for combo in itertools.product(*(self.values[k] for k in keys)):
            yield dict(zip(keys, combo))

    def __len__(self) -> int:
        return int(np.prod([len(v) for v in self.values.values()], dtype=np.int64))


def _grid(kind: str, **values) -> GridSpec:
    return GridSpec(kind, values)


def reference_grids() -> dict[str, GridSpec]:
    """The reference search space for each of the nine classifiers.

    Gaussian NB reference priors are three-class vectors; only ``None`` is
    valid for a binary target, so that axis is truncated.
    """
    logger.info("gaussian_nb priors grid truncated to [None]: 3-class prior vectors do not apply")
    return {
        "linear": _grid("linear", fit_intercept=[True, False], copy_X=[True, False]),
        "logistic": _grid("logistic", penalty=["l1", "l2"], C=[0.1, 1.0, 10.0]),
        "decision_tree": _grid(
            "decision_tree",
            max_depth=[None, 10, 20],
            min_samples_split=[2, 5, 10],
            min_samples_leaf=[1, 2, 4],
        ),
        "adaboost_r": _grid("adaboost_r", n_estimators=[50, 100, 150], learning_rate=[0.1, 0.01, 0.001]),
        "knn": _grid("knn", n_neighbors=[3, 5, 7, 9], weights=["uniform", "distance"], p=[1, 2]),
        "gaussian_nb": _grid("gaussian_nb", var_smoothing=[1e-9, 1e-8, 1e-7], priors=[None]),
        "svm_linear": _grid(
            "svm_linear",
            C=[0.1, 1.0, 10.0, 100.0],
            gamma=["scale", "auto", 0.1, 0.01, 0.001],
            class_weight=[None, "balanced"],
        ),
        "xgboost_like": _grid(
            "xgboost_like",
            n_estimators=[50, 100, 150],
            max_depth=[3, 5, 7],
            learning_rate=[0.01, 0.1, 0.2],
            min_child_weight=[1.0, 5.0, 10.0],
        ),
        "random_forest": _grid(
            "random_forest",
            n_estimators=[50, 100, 150],
            max_depth=[None, 10, 20, 30],
            min_samples_split=[2, 5, 10],
            min_samples_leaf=[1, 2, 4],
        ),
    }


# Untuned defaults for the boosted trees carry heavy regularisation (alpha 10,
# 30% of columns per tree). Tuned runs search only the grid axes and keep these
# two at neutral values instead.
TUNING_BASE: dict[str, dict[str, Any]] = {
    "xgboost_like": {"reg_alpha": 0.0, "colsample_bytree": 1.0},
}


@dataclass
class GridCell:
    index: int
    params: dict[str, Any]
    cv: CVResult
    shared_with: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "cell": self.index,
            "params": self.params,
            "fold_accuracies": self.cv.fold_accuracies,
            "mean_accuracy": None if np.isnan(self.cv.mean) else self.cv.mean,
            "errors": {str(k): v for k, v in self.cv.errors.items()},
            "shared_with": self.shared_with,
        }


@dataclass
class GridResult:
    kind: str
    best_params: dict[str, Any]
    best_score: float
    best_index: int
    cells: list[GridCell] = field(default_factory=list)

    def to_csv(self) -> str:
        keys = sorted({k for c in self.cells for k in c.params})
        k = max((len(c.cv.fold_accuracies) for c in self.cells), default=0)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["cell", *keys, *(f"fold_{i}" for i in range(k)), "mean_accuracy", "best"])
        for c in self.cells:
            writer.writerow([
                c.index,
                *(json.dumps(c.params.get(key)) for key in keys),
                *("" if a is None else repr(float(a)) for a in c.cv.fold_accuracies),
                "" if np.isnan(c.cv.mean) else repr(float(c.cv.mean)),
                c.index == self.best_index,
            ])
        return buf.getvalue()

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "best_params": self.best_params,
            "best_score": self.best_score,
            "best_cell": self.best_index,
            "cells": [c.to_dict() for c in self.cells],
        }


def grid_search(
    kind: str,
    grid: GridSpec,
    matrix: EncodedMatrix,
    plan: FoldPlan,
    resample_mode: ResampleMode | str = ResampleMode.FOLD_SAFE,
    seed: int = 0,
    base: dict[str, Any] | None = None,
) -> GridResult:
    """Cross-validate every cell and keep the highest mean accuracy (earliest cell on ties).

    Each cell's values override ``base`` (parameters held fixed across the
    grid). Cells that differ only in parameters the estimator ignores reuse the
    first such cell's result.
    """
    from ..models import effective_params, estimator_class

    kind = estimator_class(kind).kind
    cells: list[GridCell] = []
    seen: dict[str, int] = {}
    for i, params in enumerate(grid.cells()):
        full = {**(base or {}), **params}
        key = json.dumps(effective_params(kind, full), sort_keys=True, default=str)
        if key in seen:
            first = cells[seen[key]]
            cells.append(GridCell(i, params, first.cv, shared_with=first.index))
            continue
        seen[key] = i
        cv = cross_val_accuracy(kind, full, matrix, plan, resample_mode, seed=seed, cell=i)
        cells.append(GridCell(i, params, cv))
        logger.debug("%s cell %d %s -> %.4f", kind, i, params, cv.mean)
    best = None
    for c in cells:
        if c.cv.ok and (best is None or c.cv.mean > best.cv.mean):
            best = c
    if best is None:
        raise AllCellsFailed(f"every one of the {len(cells)} {kind} grid cells failed")
    return GridResult(kind, dict(best.params), best.cv.mean, best.index, cells)
