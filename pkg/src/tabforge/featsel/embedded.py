"""Selectors that read coefficients or importances off a fitted model."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import InvalidConfig, NKeepTooLarge, SingleClass
from ..models.ensembles import GradientBoosting, RandomForest
from ..models.linear import fit_lasso, fit_logistic
from ..table import EncodedMatrix
from .verdict import Selector, SelectorVerdict, median_rule, standardize


def _require_both_classes(y: np.ndarray) -> None:
    if len(np.unique(y)) < 2:
        raise SingleClass("feature selection needs both classes present")


def _ridge_logistic_coef(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    # the default logistic estimator (L2, C = 1) on standardized inputs
    return fit_logistic(X, y, l2=1.0 / X.shape[0]).coef


def select_rfe(matrix: EncodedMatrix, n_keep: int = 8, step: int = 10) -> SelectorVerdict:
    """Recursive feature elimination driven by logistic coefficient magnitudes.

    Each round refits on the surviving standardized features and drops the
    ``min(step, survivors - n_keep)`` smallest ``|coef|`` (lower index first on
    ties). Scores are elimination ranks: 1 for survivors, 2 for the last round
    removed, and so on.
    """
    X, y = matrix.features, matrix.target
    m = X.shape[1]
    if not 1 <= n_keep <= m:
        raise NKeepTooLarge(f"n_keep={n_keep} but there are {m} features")
    if step < 1:
        raise InvalidConfig("step must be at least 1")
    _require_both_classes(y)
    Xs = standardize(X)
    alive = list(range(m))
    removed_rounds: list[list[int]] = []
    while len(alive) > n_keep:
        coef = np.abs(_ridge_logistic_coef(Xs[:, alive], y))
        drop = min(step, len(alive) - n_keep)
        order = np.argsort(coef, kind="stable")[:drop]
        gone = sorted(alive[i] for i in order)
        removed_rounds.append(gone)
        alive = [j for j in alive if j not in gone]
    ranks = np.ones(m)
    for r, gone in enumerate(reversed(removed_rounds), start=2):
        ranks[gone] = r
    selected = np.zeros(m, dtype=bool)
    selected[alive] = True
    return SelectorVerdict(
        Selector.RFE.value, matrix.feature_names, selected, ranks,
        {"rounds": len(removed_rounds), "n_keep": n_keep, "step": step},
    )


def select_l1_logistic(
    matrix: EncodedMatrix, lam: float = 1e-3, threshold_multiplier: float = 1.25, max_iter: int = 200
) -> SelectorVerdict:
    """L1-penalised logistic regression on standardized features.

    Minimises mean log-loss plus ``lam * ||w||_1``. A feature is kept when its
    coefficient is non-zero and ``|w_j|`` reaches ``threshold_multiplier`` times
    the median ``|w|``.
    """
    X, y = matrix.features, matrix.target
    _require_both_classes(y)
    res = fit_logistic(standardize(X), y, l1=lam, tol=1e-6, max_iter=max_iter)
    scores = np.abs(res.coef)
    selected = (scores > 0) & median_rule(scores, threshold_multiplier)
    return SelectorVerdict(
        Selector.L1_LOGISTIC.value, matrix.feature_names, selected, scores,
        {"lambda": lam, "converged": res.converged, "iterations": res.n_iter},
    )


def select_rf_importance(
    matrix: EncodedMatrix, n_estimators: int = 100, threshold_multiplier: float = 1.25, seed: int = 0
) -> SelectorVerdict:
    """Random-forest mean impurity decrease, kept at or above the scaled median."""
    X, y = matrix.features, matrix.target
    _require_both_classes(y)
    forest = RandomForest(
        n_estimators=n_estimators, max_depth=None, min_samples_split=2, min_samples_leaf=1
    ).fit(X, y, seed=seed)
    scores = forest.feature_importances_
    return SelectorVerdict(
        Selector.RF_IMPORTANCE.value, matrix.feature_names,
        median_rule(scores, threshold_multiplier), scores,
        {"n_estimators": n_estimators, "seed": seed},
    )


@dataclass(frozen=True)
class GbmSelectorConfig:
    num_leaves: int = 32
    min_estimators: int = 500
    learning_rate: float = 0.05
    colsample_bytree: float = 0.2
    reg_alpha: float = 3.0
    reg_lambda: float = 1.0
    min_child_weight: float = 40.0

    def __post_init__(self):
        if self.min_estimators < 1:
            raise InvalidConfig("the boosting selector needs at least one round")
        if self.learning_rate <= 0:
            raise InvalidConfig("learning_rate must be positive")
        if self.num_leaves < 2:
            raise InvalidConfig("num_leaves must be at least 2")
        if not 0 < self.colsample_bytree <= 1:
            raise InvalidConfig("colsample_bytree must lie in (0, 1]")


def select_gbm_importance(
    matrix: EncodedMatrix,
    config: GbmSelectorConfig | None = None,
    threshold_multiplier: float = 1.0,
    seed: int = 0,
) -> SelectorVerdict:
    """Split-gain importance of a leaf-wise boosted ensemble, kept at or above the scaled median."""
    config = config or GbmSelectorConfig()
    X, y = matrix.features, matrix.target
    _require_both_classes(y)
    model = GradientBoosting(
        n_estimators=config.min_estimators,
        learning_rate=config.learning_rate,
        colsample_bytree=config.colsample_bytree,
        reg_alpha=config.reg_alpha,
        reg_lambda=config.reg_lambda,
        min_child_weight=config.min_child_weight,
        num_leaves=config.num_leaves,
        growth="leaf",
        max_depth=None,
    ).fit(X, y, seed=seed)
    scores = model.feature_importances_
    return SelectorVerdict(
        Selector.GBM_IMPORTANCE.value, matrix.feature_names,
        median_rule(scores, threshold_multiplier), scores,
        {"config": asdict(config), "seed": seed},
    )


def select_lasso(matrix: EncodedMatrix, alpha: float = 1e-3) -> SelectorVerdict:
    """LASSO on standardized features against the 0/1 target; non-zero coefficients are kept."""
    X = standardize(matrix.features)
    res = fit_lasso(X, matrix.target.astype(float), alpha=alpha, tol=1e-8)
    scores = np.abs(res.coef)
    return SelectorVerdict(
        Selector.LASSO.value, matrix.feature_names, scores > 1e-12, scores,
        {"alpha": alpha, "converged": res.converged, "sweeps": res.n_iter},
    )
