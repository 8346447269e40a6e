"""Per-selector verdicts shared by every selection procedure."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np


class Selector(str, Enum):
    PEARSON = "pearson"
    CHI2 = "chi2"
    RFE = "rfe"
    L1_LOGISTIC = "l1_logistic"
    RF_IMPORTANCE = "rf_importance"
    GBM_IMPORTANCE = "gbm_importance"
    LASSO = "lasso"
    BEE_COLONY = "bee_colony"


ALL_SELECTORS: tuple[str, ...] = tuple(s.value for s in Selector)


@dataclass(frozen=True)
class SelectorVerdict:
    selector: str
    feature_names: tuple[str, ...]
    selected: np.ndarray
    scores: np.ndarray
    details: dict[str, Any] | None = None

    def __post_init__(self):
        selected = np.asarray(self.selected, dtype=bool)
        scores = np.asarray(self.scores, dtype=float)
        if not (len(selected) == len(scores) == len(self.feature_names)):
            raise ValueError("selected, scores and feature_names must have equal length")
        object.__setattr__(self, "selected", selected)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def chosen(self) -> list[str]:
        return [n for n, s in zip(self.feature_names, self.selected) if s]

    def to_dict(self) -> dict[str, Any]:
        return {
            "selector": self.selector,
            "features": list(self.feature_names),
            "selected": self.selected.tolist(),
            "scores": self.scores.tolist(),
            "details": self.details or {},
        }


def standardize(X: np.ndarray) -> np.ndarray:
    """Zero-mean, unit-variance columns; constant columns become all zeros."""
    X = np.asarray(X, dtype=float)
    sd = X.std(axis=0)
    return (X - X.mean(axis=0)) / np.where(sd > 0, sd, 1.0)


def median_rule(scores: np.ndarray, multiplier: float) -> np.ndarray:
    """Keep scores at or above ``multiplier`` times the median score."""
    return scores >= multiplier * np.median(scores)

