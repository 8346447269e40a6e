"""Dataset representation, CSV ingestion, label encoding, splitting and oversampling."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateRatio,
    EmptyClass,
    HeaderMismatch,
    MissingFile,
    NoTargetColumn,
    NullPresent,
    SingleClass,
    UnknownColumn,
    UnparsableCell,
)

logger = logging.getLogger(__name__)

NULL_LITERALS = frozenset({"N/A", ""})


class ColumnKind(str, Enum):
    INTEGER = "integer"
    REAL = "real"
    CATEGORICAL = "categorical"
    TARGET = "binary-target"

    @property
    def numeric(self) -> bool:
        return self is not ColumnKind.CATEGORICAL


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    kind: ColumnKind
    allowed_categories: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ColumnKind(self.kind))
        if self.allowed_categories is not None:
            object.__setattr__(self, "allowed_categories", tuple(self.allowed_categories))

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "kind": self.kind.value}
        if self.allowed_categories is not None:
            out["allowed_categories"] = list(self.allowed_categories)
        return out


def _check_schema(schema: Sequence[ColumnSchema]) -> None:
    targets = [c.name for c in schema if c.kind is ColumnKind.TARGET]
    if len(targets) != 1:
        raise NoTargetColumn(f"schema must have exactly one binary-target column, found {targets}")


# Column names follow the public stroke-prediction CSV header verbatim.
STROKE_SCHEMA: tuple[ColumnSchema, ...] = (
    ColumnSchema("id", ColumnKind.INTEGER),
    ColumnSchema("gender", ColumnKind.CATEGORICAL, ("Female", "Male", "Other")),
    ColumnSchema("age", ColumnKind.REAL),
    ColumnSchema("hypertension", ColumnKind.INTEGER),
    ColumnSchema("heart_disease", ColumnKind.INTEGER),
    ColumnSchema("ever_married", ColumnKind.CATEGORICAL, ("No", "Yes")),
    ColumnSchema(
        "work_type",
        ColumnKind.CATEGORICAL,
        ("Govt_job", "Never_worked", "Private", "Self-employed", "children"),
    ),
    ColumnSchema("Residence_type", ColumnKind.CATEGORICAL, ("Rural", "Urban")),
    ColumnSchema("avg_glucose_level", ColumnKind.REAL),
    ColumnSchema("bmi", ColumnKind.REAL),
    ColumnSchema(
        "smoking_status",
        ColumnKind.CATEGORICAL,
        ("Unknown", "formerly smoked", "never smoked", "smokes"),
    ),
    ColumnSchema("stroke", ColumnKind.TARGET),
)


def load_schema(path: str | os.PathLike) -> tuple[ColumnSchema, ...]:
    """Read a JSON schema file: a list of ``{"name", "kind", "allowed_categories"?}`` objects."""
    if not os.path.exists(path):
        raise MissingFile(f"schema file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    schema = tuple(
        ColumnSchema(c["name"], ColumnKind(c["kind"]), c.get("allowed_categories")) for c in raw
    )
    _check_schema(schema)
    return schema


@dataclass(frozen=True)
class Table:
    """Row-major table. Cells are floats, ints, category strings or ``None``."""

    schema: tuple[ColumnSchema, ...]
    rows: tuple[tuple[Any, ...], ...]
    added_categories: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "schema", tuple(self.schema))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        width = len(self.schema)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, schema has {width} columns")

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.schema]

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_columns(self) -> int:
        return len(self.schema)

    def index_of(self, name: str) -> int:
        for i, col in enumerate(self.schema):
            if col.name == name:
                return i
        raise UnknownColumn(f"unknown column {name!r}")

    def column_schema(self, name: str) -> ColumnSchema:
        return self.schema[self.index_of(name)]

    def column(self, name: str) -> list[Any]:
        j = self.index_of(name)
        return [row[j] for row in self.rows]

    def null_count(self, name: str | None = None) -> int:
        if name is not None:
            return sum(v is None for v in self.column(name))
        return sum(v is None for row in self.rows for v in row)

    def target_name(self) -> str:
        for col in self.schema:
            if col.kind is ColumnKind.TARGET:
                return col.name
        raise NoTargetColumn("table has no binary-target column")

    def with_rows(self, rows: Iterable[Sequence[Any]]) -> "Table":
        return replace(self, rows=tuple(tuple(r) for r in rows))

    def with_column(self, name: str, values: Sequence[Any]) -> "Table":
        j = self.index_of(name)
        if len(values) != self.n_rows:
            raise ValueError("replacement column length differs from row count")
        rows = [row[:j] + (v,) + row[j + 1:] for row, v in zip(self.rows, values)]
        return replace(self, rows=tuple(rows))

    def take(self, indices: Iterable[int]) -> "Table":
        return replace(self, rows=tuple(self.rows[i] for i in indices))


def _parse_number(text: str, kind: ColumnKind) -> float | int:
    value = float(text)
    if kind is not ColumnKind.REAL and value.is_integer():
        return int(value)
    return value


def _numbered_records(path: str | os.PathLike) -> Iterable[tuple[int, list[str]]]:
    # row numbers count the header as row 1 so they match editor line numbers
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if record:
                yield lineno, record


def read_records(path: str | os.PathLike) -> tuple[list[str], list[list[str]]]:
    """Header and raw string records of any headered UTF-8 CSV; blank lines are skipped."""
    if not os.path.isfile(path):
        raise MissingFile(f"file not found: {path}")
    records = [r for _, r in _numbered_records(path)]
    if not records:
        raise HeaderMismatch(f"{path} has no header row")
    return records[0], records[1:]


def load_csv(path: str | os.PathLike, schema: Sequence[ColumnSchema] = STROKE_SCHEMA) -> Table:
    """Read a headered UTF-8 CSV into a :class:`Table`.

    ``"N/A"`` and empty cells become ``None``. Category strings missing from a
    column's ``allowed_categories`` are accepted, appended to the schema, and
    listed in ``Table.added_categories``.
    """
    schema = tuple(schema)
    _check_schema(schema)
    if not os.path.isfile(path):
        raise MissingFile(f"dataset not found: {path}")

    numbered = _numbered_records(path)
    first = next(numbered, None)
    header = None if first is None else first[1]
    expected = [c.name for c in schema]
    if header is None or [h.strip() for h in header] != expected:
        raise HeaderMismatch(f"header {header} does not match schema {expected}")

    known = [set(c.allowed_categories or ()) for c in schema]
    added: dict[str, list[str]] = {}
    rows = []
    for lineno, record in numbered:
        if len(record) != len(schema):
            raise HeaderMismatch(f"row {lineno} has {len(record)} fields, expected {len(schema)}")
        cells = []
        for j, (text, col) in enumerate(zip(record, schema)):
            text = text.strip()
            if text in NULL_LITERALS:
                cells.append(None)
            elif col.kind.numeric:
                try:
                    cells.append(_parse_number(text, col.kind))
                except ValueError:
                    raise UnparsableCell(lineno, col.name, text) from None
            else:
                if text not in known[j]:
                    known[j].add(text)
                    added.setdefault(col.name, []).append(text)
                cells.append(text)
        rows.append(tuple(cells))

    new_schema = []
    for col in schema:
        if col.kind is ColumnKind.CATEGORICAL:
            ordered = list(col.allowed_categories or ())
            ordered += [c for c in added.get(col.name, []) if c not in ordered]
            col = replace(col, allowed_categories=tuple(ordered))
        new_schema.append(col)
    for name, cats in added.items():
        logger.warning("column %s: added unlisted categories %s", name, cats)
    return Table(tuple(new_schema), tuple(rows), {k: tuple(v) for k, v in added.items()})


def write_csv(table: Table, path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.names)
        for row in table.rows:
            writer.writerow(["N/A" if v is None else v for v in row])


@dataclass(frozen=True)
class EncodedMatrix:
    features: np.ndarray
    target: np.ndarray
    feature_names: tuple[str, ...]
    encoding_map: dict[str, dict[str, int]] = field(default_factory=dict)

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        if features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        target = np.asarray(self.target).astype(np.int64)
        if target.shape != (features.shape[0],):
            raise ValueError("target length must equal the number of feature rows")
        if not np.isin(target, (0, 1)).all():
            raise ValueError("target values must be 0 or 1")
        if len(self.feature_names) != features.shape[1]:
            raise ValueError("feature_names length must equal the number of feature columns")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def take(self, rows: Sequence[int] | np.ndarray) -> "EncodedMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        return replace(self, features=self.features[rows], target=self.target[rows])

    def select(self, names: Sequence[str]) -> "EncodedMatrix":
        cols = [self.feature_names.index(n) for n in names]
        enc = {k: v for k, v in self.encoding_map.items() if k in names}
        return EncodedMatrix(self.features[:, cols], self.target, tuple(names), enc)

    def decode(self, column: str, codes: Iterable[float]) -> list[str]:
        inverse = {code: cat for cat, code in self.encoding_map[column].items()}
        return [inverse[int(c)] for c in codes]

    def encoding_map_json(self) -> str:
        return json.dumps(self.encoding_map, indent=2, sort_keys=True)


def label_encode(table: Table, exclude: Sequence[str] = ("id",)) -> EncodedMatrix:
    """Turn a null-free table into a numeric feature matrix plus target vector.

    Category codes are consecutive integers in ascending string order. Columns in
    ``exclude`` (the row identifier by default) are dropped; missing excluded
    names are ignored.
    """
    target_name = table.target_name()
    if table.null_count():
        raise NullPresent(f"{table.null_count()} null cells remain; impute before encoding")

    feature_cols = [c for c in table.schema if c.kind is not ColumnKind.TARGET and c.name not in exclude]
    encoding_map: dict[str, dict[str, int]] = {}
    columns = []
    for col in feature_cols:
        values = table.column(col.name)
        if col.kind is ColumnKind.CATEGORICAL:
            cats = sorted(set(col.allowed_categories or ()) | set(values))
            mapping = {cat: code for code, cat in enumerate(cats)}
            encoding_map[col.name] = mapping
            columns.append([mapping[v] for v in values])
        else:
            columns.append(values)

    n = table.n_rows
    features = np.array(columns, dtype=float).T if columns else np.empty((n, 0))
    features = features.reshape(n, len(feature_cols))
    target = np.array(table.column(target_name), dtype=float)
    return EncodedMatrix(features, target, tuple(c.name for c in feature_cols), encoding_map)


@dataclass(frozen=True)
class SplitIndices:
    train: np.ndarray
    test: np.ndarray
    seed: int
    ratio: float


def _allocate(sizes: Sequence[int], total: int) -> list[int]:
    """Largest-remainder apportionment of ``total`` across groups of ``sizes``."""
    n = sum(sizes)
    quotas = [s * total / n for s in sizes]
    alloc = [math.floor(q) for q in quotas]
    remainders = sorted(range(len(sizes)), key=lambda i: (-(quotas[i] - alloc[i]), i))
    for i in remainders[: total - sum(alloc)]:
        alloc[i] += 1
    return alloc


def train_test_split(
    matrix: EncodedMatrix | np.ndarray,
    ratio: float = 0.8,
    seed: int = 0,
    stratified: bool = True,
) -> SplitIndices:
    """Partition row indices into train/test with ``|train| = floor(ratio * n)``.

    ``matrix`` may also be a bare target vector. Index arrays are returned sorted.
    """
    target = matrix.target if isinstance(matrix, EncodedMatrix) else np.asarray(matrix)
    n = len(target)
    if not 0.0 < ratio < 1.0:
        raise DegenerateRatio(f"ratio must lie strictly between 0 and 1, got {ratio}")
    if n < 2:
        raise DegenerateRatio(f"need at least 2 rows to split, got {n}")
    n_train = math.floor(ratio * n)
    if n_train == 0 or n_train == n:
        raise DegenerateRatio(f"ratio {ratio} on {n} rows leaves an empty partition")

    rng = np.random.default_rng(seed)
    if stratified:
        groups = [np.flatnonzero(target == c) for c in (0, 1)]
        if any(len(g) == 0 for g in groups):
            raise EmptyClass("stratified split needs both classes present")
        counts = _allocate([len(g) for g in groups], n_train)
        train_parts = []
        for g, k in zip(groups, counts):
            train_parts.append(rng.permutation(g)[:k])
        train = np.concatenate(train_parts)
    else:
        train = rng.permutation(n)[:n_train]
    train = np.sort(train)
    mask = np.ones(n, dtype=bool)
    mask[train] = False
    return SplitIndices(train, np.flatnonzero(mask), seed, ratio)


def oversample_minority(
    features: np.ndarray, target: np.ndarray, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Append minority rows drawn uniformly with replacement until classes are 1:1.

    The original rows come first, unchanged and in order.
    """
    features = np.asarray(features, dtype=float)
    target = np.asarray(target).astype(np.int64)
    counts = np.bincount(target, minlength=2)
    if counts.min() == 0:
        raise SingleClass("oversampling needs both classes present")
    deficit = int(counts.max() - counts.min())
    if deficit == 0:
        return features.copy(), target.copy()
    minority = int(np.argmin(counts))
    pool = np.flatnonzero(target == minority)
    rng = np.random.default_rng(seed)
    extra = rng.choice(pool, size=deficit, replace=True)
    return (
        np.concatenate([features, features[extra]]),
        np.concatenate([target, target[extra]]),
    )
