"""Null imputation, outlier rows, duplicates, min-max scaling, histograms and correlation."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import AllNull, NonNumericColumn, NullPresent, ZeroBins
from .table import ColumnKind, EncodedMatrix, Table

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ImputationPolicy:
    column: str
    strategy: Literal["mean", "constant"] = "mean"
    constant_value: float = 0.0

    def __post_init__(self):
        if self.strategy not in ("mean", "constant"):
            raise ValueError(f"unknown imputation strategy {self.strategy!r}")


@dataclass(frozen=True)
class OutlierRule:
    """Open-interval bounds: values strictly outside ``(lower_bound, upper_bound)`` are outliers.

    ``mode="drop"`` removes the row, ``mode="replace"`` overwrites the cell
    with ``replacement``.
    """

    column: str
    lower_bound: float
    upper_bound: float
    mode: Literal["drop", "replace"] = "drop"
    replacement: float = 0.0

    def __post_init__(self):
        if not self.lower_bound < self.upper_bound:
            raise ValueError("lower_bound must be below upper_bound")
        if self.mode not in ("drop", "replace"):
            raise ValueError(f"unknown outlier mode {self.mode!r}")


BMI_OUTLIER_RULE = OutlierRule("bmi", 12.7, 45.0)


@dataclass
class PreprocessReport:
    imputed_count: dict[str, int] = field(default_factory=dict)
    dropped_rows: int = 0
    dropped_positive: int = 0
    duplicate_rows: int = 0
    normalization_bounds: dict[str, tuple[float, float]] = field(default_factory=dict)
    rows_in: int = 0
    rows_out: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _numeric_column(table: Table, column: str) -> int:
    j = table.index_of(column)
    if not table.schema[j].kind.numeric:
        raise NonNumericColumn(f"column {column!r} is not numeric")
    return j


def impute_nulls(table: Table, policy: ImputationPolicy) -> tuple[Table, int]:
    j = _numeric_column(table, policy.column)
    values = [row[j] for row in table.rows]
    present = [v for v in values if v is not None]
    n_missing = len(values) - len(present)
    if n_missing == 0:
        return table, 0
    if policy.strategy == "mean":
        if not present:
            raise AllNull(f"column {policy.column!r} has no values to average")
        fill = float(np.mean(present))
    else:
        fill = float(policy.constant_value)
    filled = [fill if v is None else v for v in values]
    return table.with_column(policy.column, filled), n_missing


def outlier_rows(table: Table, rule: OutlierRule) -> list[int]:
    """Indices of rows whose value lies outside the rule's open interval (nulls never match)."""
    j = _numeric_column(table, rule.column)
    return [
        i
        for i, row in enumerate(table.rows)
        if row[j] is not None and (row[j] > rule.upper_bound or row[j] < rule.lower_bound)
    ]


def drop_outliers(table: Table, rule: OutlierRule) -> tuple[Table, int]:
    hits = outlier_rows(table, rule)
    if not hits:
        return table, 0
    if rule.mode == "replace":
        j = table.index_of(rule.column)
        hit = set(hits)
        values = [rule.replacement if i in hit else row[j] for i, row in enumerate(table.rows)]
        return table.with_column(rule.column, values), 0
    hit = set(hits)
    return table.with_rows(row for i, row in enumerate(table.rows) if i not in hit), len(hits)


def find_duplicates(table: Table, subset: Sequence[str] | None = None) -> list[tuple[int, int]]:
    """All pairs ``(i, j)``, ``i < j``, of rows equal on every column or on ``subset``."""
    cols = [table.index_of(c) for c in subset] if subset else list(range(table.n_columns))
    groups: dict[tuple, list[int]] = {}
    for i, row in enumerate(table.rows):
        groups.setdefault(tuple(row[c] for c in cols), []).append(i)
    pairs = []
    for members in groups.values():
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                pairs.append((members[a], members[b]))
    return sorted(pairs)


def normalize_minmax(table: Table, column: str) -> tuple[Table, tuple[float, float]]:
    j = _numeric_column(table, column)
    values = [row[j] for row in table.rows]
    if any(v is None for v in values):
        raise NullPresent(f"column {column!r} still has nulls")
    if not values:
        return table, (0.0, 0.0)
    arr = np.asarray(values, dtype=float)
    lo, hi = float(arr.min()), float(arr.max())
    if hi == lo:
        scaled = np.zeros_like(arr)
    else:
        scaled = (arr - lo) / (hi - lo)
    return table.with_column(column, scaled.tolist()), (lo, hi)


def denormalize_minmax(values: Sequence[float], bounds: tuple[float, float]) -> np.ndarray:
    lo, hi = bounds
    return np.asarray(values, dtype=float) * (hi - lo) + lo


@dataclass(frozen=True)
class Histogram:
    column: str
    bin_edges: tuple[float, ...]
    frequencies: tuple[int, ...]
    categories: tuple[str, ...] | None = None

    @property
    def midpoints(self) -> list[float]:
        e = self.bin_edges
        return [(e[i] + e[i + 1]) / 2 for i in range(len(self.frequencies))]

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["bin_midpoint", "frequency"])
        for mid, freq in zip(self.midpoints, self.frequencies):
            writer.writerow([repr(float(mid)), freq])
        return buf.getvalue()


def histogram(table: Table, column: str, bin_count: int = 10) -> Histogram:
    """Equal-width bins over ``[min, max]`` (last bin closed); one bin per category for categoricals."""
    col = table.column_schema(column)
    values = [v for v in table.column(column) if v is not None]
    if col.kind is ColumnKind.CATEGORICAL:
        cats = tuple(sorted(set(col.allowed_categories or ()) | set(values)))
        freq = tuple(sum(v == c for v in values) for c in cats)
        edges = tuple(float(i) - 0.5 for i in range(len(cats) + 1))
        return Histogram(column, edges, freq, cats)
    if bin_count < 1:
        raise ZeroBins("bin_count must be positive")
    freq, edges = np.histogram(np.asarray(values, dtype=float), bins=bin_count)
    return Histogram(column, tuple(float(e) for e in edges), tuple(int(f) for f in freq))


def modal_category(hist: Histogram) -> tuple[str, float]:
    """Most frequent category and its share of non-null values."""
    if hist.categories is None:
        raise NonNumericColumn("modal_category needs a categorical histogram")
    total = sum(hist.frequencies)
    k = int(np.argmax(hist.frequencies))
    return hist.categories[k], hist.frequencies[k] / total


def correlation_matrix(matrix: EncodedMatrix | np.ndarray) -> tuple[np.ndarray, list[bool]]:
    """Pairwise Pearson correlations between feature columns.

    Returns the matrix and a per-column flag marking zero-variance columns, whose
    rows and columns (diagonal included) are emitted as 0.
    """
    x = matrix.features if isinstance(matrix, EncodedMatrix) else np.asarray(matrix, dtype=float)
    centred = x - x.mean(axis=0)
    norms = np.sqrt((centred**2).sum(axis=0))
    degenerate = norms == 0
    safe = np.where(degenerate, 1.0, norms)
    unit = centred / safe
    corr = unit.T @ unit
    corr[degenerate, :] = 0.0
    corr[:, degenerate] = 0.0
    idx = np.flatnonzero(~degenerate)
    corr[idx, idx] = 1.0
    corr = np.clip((corr + corr.T) / 2, -1.0, 1.0)
    if degenerate.any():
        logger.warning("zero-variance columns in correlation matrix: %s", np.flatnonzero(degenerate).tolist())
    return corr, degenerate.tolist()


def preprocess_table(
    table: Table,
    imputations: Sequence[ImputationPolicy] = (ImputationPolicy("bmi"),),
    outlier_rules: Sequence[OutlierRule] = (BMI_OUTLIER_RULE,),
    normalize: Sequence[str] = ("age",),
) -> tuple[Table, PreprocessReport]:
    """Impute, remove outliers, scan for duplicates and scale, recording what happened."""
    report = PreprocessReport(rows_in=table.n_rows)
    for policy in imputations:
        table, count = impute_nulls(table, policy)
        report.imputed_count[policy.column] = count
    target = table.index_of(table.target_name())
    for rule in outlier_rules:
        hits = outlier_rows(table, rule)
        if rule.mode == "drop":
            report.dropped_positive += sum(table.rows[i][target] == 1 for i in hits)
        table, dropped = drop_outliers(table, rule)
        report.dropped_rows += dropped
    report.duplicate_rows = len(find_duplicates(table))
    for column in normalize:
        table, bounds = normalize_minmax(table, column)
        report.normalization_bounds[column] = bounds
    report.rows_out = table.n_rows
    return table, report


__all__ = [
    "BMI_OUTLIER_RULE",
    "Histogram",
    "ImputationPolicy",
    "OutlierRule",
    "PreprocessReport",
    "correlation_matrix",
    "denormalize_minmax",
    "drop_outliers",
    "find_duplicates",
    "histogram",
    "impute_nulls",
    "modal_category",
    "normalize_minmax",
    "outlier_rows",
    "preprocess_table",
]
