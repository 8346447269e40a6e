"""Stratified k-fold plans and cross-validated accuracy."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator

import numpy as np

from ..errors import KTooLarge
from ..table import EncodedMatrix, oversample_minority
from .seeds import derive_seed

logger = logging.getLogger(__name__)


class ResampleMode(str, Enum):
    FOLD_SAFE = "fold_safe"
    PRE_SPLIT = "pre_split"
    NONE = "none"


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray
    stratified: bool
    seed: int

    def folds(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """``(train_rows, validation_rows)`` for each fold in order."""
        for f in range(self.k):
            yield np.flatnonzero(self.assignments != f), np.flatnonzero(self.assignments == f)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)


def kfold_plan(target, k: int = 5, stratified: bool = True, seed: int = 0) -> FoldPlan:
    """Assign rows to ``k`` folds.

    Rows are shuffled within each class, the classes are laid end to end and
    positions are dealt round-robin, so fold sizes and per-fold class counts each
    differ by at most one. A class smaller than ``k`` downgrades to a plain
    shuffled plan with a warning.
    """
    y = np.asarray(target).astype(np.int64)
    n = len(y)
    if k < 2:
        raise KTooLarge(f"k must be at least 2, got {k}")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the {n} available rows")
    rng = np.random.default_rng(seed)
    if stratified and min(int((y == c).sum()) for c in (0, 1)) < k:
        warnings.warn(
            f"a class has fewer than k={k} members; using unstratified folds", stacklevel=2
        )
        stratified = False
    if stratified:
        order = np.concatenate([rng.permutation(np.flatnonzero(y == c)) for c in (0, 1)])
    else:
        order = rng.permutation(n)
    assignments = np.empty(n, dtype=np.int64)
    assignments[order] = np.arange(n) % k
    return FoldPlan(k, assignments, stratified, seed)


@dataclass
class CVResult:
    fold_accuracies: list[float | None]
    mean: float
    errors: dict[int, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not np.isnan(self.mean)


def cross_val_accuracy(
    kind: Any,
    params: dict[str, Any] | None,
    matrix: EncodedMatrix,
    plan: FoldPlan,
    resample_mode: ResampleMode | str = ResampleMode.FOLD_SAFE,
    seed: int = 0,
    cell: int = 0,
) -> CVResult:
    """Mean validation accuracy over the folds of ``plan``.

    Under ``fold_safe`` only the training part of each fold is oversampled. The
    other modes fit on the fold as given (``pre_split`` data was balanced
    upstream). A fold whose fit raises is recorded as failed and excluded from
    the mean, with a warning; if every fold fails the mean is NaN.

    Resampling seeds depend on ``(seed, fold)`` so every grid cell sees the same
    training folds; model seeds depend on ``(seed, cell, fold)``.
    """
    from ..models import fit, predict

    mode = ResampleMode(resample_mode)
    accs: list[float | None] = []
    errors: dict[int, str] = {}
    for f, (tr, va) in enumerate(plan.folds()):
        X, y = matrix.features[tr], matrix.target[tr]
        if mode is ResampleMode.FOLD_SAFE:
            X, y = oversample_minority(X, y, seed=derive_seed(seed, "resample", f))
        try:
            model = fit(kind, (X, y), params, seed=derive_seed(seed, cell, f))
            pred = predict(model, matrix.features[va])
        except Exception as exc:  # a failed fold must not abort the whole search
            errors[f] = f"{type(exc).__name__}: {exc}"
            accs.append(None)
            continue
        accs.append(float(np.mean(pred == matrix.target[va])))
    good = [a for a in accs if a is not None]
    if errors:
        warnings.warn(f"{len(errors)} of {plan.k} folds failed: {errors}", stacklevel=2)
    mean = float(np.mean(good)) if good else float("nan")
    return CVResult(accs, mean, errors)
