"""Model-free filters: Pearson correlation and the chi-square independence test."""

from __future__ import annotations

import numpy as np
from scipy.stats import chi2 as chi2_dist

from ..errors import ConstantTarget, EmptyContingency, NegativeFeature
from ..table import EncodedMatrix
from .verdict import Selector, SelectorVerdict


def pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    """Sample correlation coefficient; 0 when either vector is constant."""
    dx = x - x.mean()
    dy = y - y.mean()
    denom = np.sqrt((dx @ dx) * (dy @ dy))
    return float(dx @ dy / denom) if denom > 0 else 0.0


def select_pearson(matrix: EncodedMatrix, threshold: float = 0.0) -> SelectorVerdict:
    """Keep features whose absolute correlation with the target reaches ``threshold``.

    A constant feature has no defined correlation: it scores 0 and is never kept.
    """
    X = matrix.features
    y = matrix.target.astype(float)
    if y.size == 0 or np.all(y == y[0]):
        raise ConstantTarget("the target has zero variance")
    scores = np.array([pearson_r(X[:, j], y) for j in range(X.shape[1])])
    defined = X.std(axis=0) > 0
    selected = defined & (np.abs(scores) >= threshold)
    return SelectorVerdict(Selector.PEARSON.value, matrix.feature_names, selected, scores)


def chi2_statistic(observed: np.ndarray) -> tuple[float, int]:
    """Pearson chi-square of a contingency table and its degrees of freedom.

    Expected counts are ``row_total * col_total / n``; all-zero rows and columns
    are dropped first.
    """
    O = np.asarray(observed, dtype=float)
    O = O[O.sum(axis=1) > 0][:, O.sum(axis=0) > 0]
    n = O.sum()
    if n <= 0:
        raise EmptyContingency("contingency table has no observations")
    E = np.outer(O.sum(axis=1), O.sum(axis=0)) / n
    stat = float(((O - E) ** 2 / E).sum())
    dof = (O.shape[0] - 1) * (O.shape[1] - 1)
    return stat, dof


def contingency(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Counts of each distinct feature value (rows) against target 0/1 (columns)."""
    values, inverse = np.unique(x, return_inverse=True)
    table = np.zeros((len(values), 2))
    np.add.at(table, (inverse.ravel(), np.asarray(y, dtype=np.int64)), 1)
    return table


def quartile_bins(x: np.ndarray) -> np.ndarray:
    """Bin codes 0..3 at the sample quartiles (fewer codes when quartiles coincide)."""
    edges = np.unique(np.quantile(x, [0.25, 0.5, 0.75]))
    return np.searchsorted(edges, x, side="left").astype(float)


def select_chi2(
    matrix: EncodedMatrix, alpha: float = 0.05, max_levels: int = 10
) -> SelectorVerdict:
    """Chi-square test of independence between each feature and the target.

    Encoded categorical columns and numeric columns with at most ``max_levels``
    distinct values are used as they are; other continuous columns are binned at
    their quartiles. A feature is kept when its p-value is below ``alpha``.
    """
    X = matrix.features
    y = matrix.target
    if X.shape[0] == 0:
        raise EmptyContingency("no rows to test")
    if (X < 0).any():
        bad = [n for n, col in zip(matrix.feature_names, X.T) if (col < 0).any()]
        raise NegativeFeature(f"chi-square needs non-negative features; negative values in {bad}")
    scores = np.zeros(X.shape[1])
    pvalues = np.ones(X.shape[1])
    binned = []
    for j, name in enumerate(matrix.feature_names):
        x = X[:, j]
        if name not in matrix.encoding_map and len(np.unique(x)) > max_levels:
            x = quartile_bins(x)
            binned.append(name)
        stat, dof = chi2_statistic(contingency(x, y))
        scores[j] = stat
        pvalues[j] = float(chi2_dist.sf(stat, dof)) if dof > 0 else 1.0
    return SelectorVerdict(
        Selector.CHI2.value, matrix.feature_names, pvalues < alpha, scores,
        {"p_values": pvalues.tolist(), "binned": binned, "alpha": alpha},
    )
