import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tabforge.errors import AllNull, NonNumericColumn, NullPresent, UnknownColumn, ZeroBins
from tabforge.preprocess import (
    BMI_OUTLIER_RULE,
    ImputationPolicy,
    OutlierRule,
    correlation_matrix,
    denormalize_minmax,
    drop_outliers,
    find_duplicates,
    histogram,
    impute_nulls,
    modal_category,
    normalize_minmax,
    outlier_rows,
    preprocess_table,
)
from tabforge.table import ColumnKind, ColumnSchema, Table

SCHEMA = (
    ColumnSchema("age", ColumnKind.REAL),
    ColumnSchema("bmi", ColumnKind.REAL),
    ColumnSchema("sex", ColumnKind.CATEGORICAL, ("F", "M")),
    ColumnSchema("y", ColumnKind.TARGET),
)


def table(rows):
    return Table(SCHEMA, rows)


def test_mean_imputation():
    t = table([(1.0, 1.0, "F", 0), (2.0, None, "M", 1), (3.0, 3.0, "F", 0)])
    out, count = impute_nulls(t, ImputationPolicy("bmi"))
    assert count == 1
    assert out.column("bmi") == [1.0, 2.0, 3.0]


def test_constant_imputation_and_noop():
    t = table([(1.0, None, "F", 0), (2.0, 4.0, "M", 1)])
    out, count = impute_nulls(t, ImputationPolicy("bmi", "constant", 0.0))
    assert (out.column("bmi"), count) == ([0.0, 4.0], 1)
    same, zero = impute_nulls(out, ImputationPolicy("bmi"))
    assert zero == 0 and same is out


def test_imputation_errors():
    t = table([(1.0, None, "F", 0)])
    with pytest.raises(AllNull):
        impute_nulls(t, ImputationPolicy("bmi"))
    with pytest.raises(UnknownColumn):
        impute_nulls(t, ImputationPolicy("glucose"))
    with pytest.raises(NonNumericColumn):
        impute_nulls(t, ImputationPolicy("sex"))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.one_of(st.none(), st.floats(-1e3, 1e3)), min_size=1, max_size=40).filter(
    lambda v: any(x is not None for x in v)))
def test_imputation_preserves_mean(values):
    t = table([(0.0, v, "F", 0) for v in values])
    out, count = impute_nulls(t, ImputationPolicy("bmi"))
    present = [v for v in values if v is not None]
    assert count == len(values) - len(present)
    assert np.mean(out.column("bmi")) == pytest.approx(np.mean(present), abs=1e-9)


def test_drop_outliers_example():
    t = table([(1.0, 10.0, "F", 1), (2.0, 20.0, "M", 0), (3.0, 50.0, "F", 0)])
    out, dropped = drop_outliers(t, BMI_OUTLIER_RULE)
    assert dropped == 2 and out.column("bmi") == [20.0]
    assert outlier_rows(t, BMI_OUTLIER_RULE) == [0, 2]


def test_outlier_bounds_are_open():
    t = table([(1.0, 12.7, "F", 0), (2.0, 45.0, "M", 0), (3.0, 45.01, "F", 0)])
    out, dropped = drop_outliers(t, BMI_OUTLIER_RULE)
    assert dropped == 1 and out.column("bmi") == [12.7, 45.0]


def test_replace_mode_keeps_rows():
    rule = OutlierRule("bmi", 12.7, 45.0, mode="replace", replacement=0.0)
    t = table([(1.0, 10.0, "F", 0), (2.0, 20.0, "M", 0)])
    out, dropped = drop_outliers(t, rule)
    assert dropped == 0 and out.column("bmi") == [0.0, 20.0]
    with pytest.raises(NonNumericColumn):
        drop_outliers(t, OutlierRule("sex", 0, 1))
    with pytest.raises(ValueError):
        OutlierRule("bmi", 5, 5)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 100), max_size=40))
def test_drop_outliers_idempotent_and_order_preserving(values):
    t = table([(float(i), v, "F", 0) for i, v in enumerate(values)])
    once, _ = drop_outliers(t, BMI_OUTLIER_RULE)
    twice, dropped = drop_outliers(once, BMI_OUTLIER_RULE)
    assert dropped == 0 and twice.rows == once.rows
    kept = [r[0] for r in once.rows]
    assert kept == sorted(kept)


def test_duplicates():
    rows = [(1.0, 20.0, "F", 0), (1.0, 20.0, "M", 1), (2.0, 30.0, "F", 0), (3.0, 40.0, "M", 1)]
    t = table(rows)
    assert find_duplicates(t) == []
    assert find_duplicates(t, ["age", "bmi"]) == [(0, 1)]
    assert find_duplicates(table(rows + [rows[2]])) == [(2, 4)]
    with pytest.raises(UnknownColumn):
        find_duplicates(t, ["nope"])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10)), max_size=20, unique=True))
def test_self_concatenation_gives_n_pairs(pairs):
    rows = [(a, b, "F", 0) for a, b in pairs]
    assert len(find_duplicates(table(rows + rows))) == len(rows)


def test_minmax_examples():
    t = table([(0.08, 1.0, "F", 0), (41.0, 1.0, "M", 0), (82.0, 1.0, "F", 0)])
    out, bounds = normalize_minmax(t, "age")
    assert bounds == (0.08, 82.0)
    assert out.column("age")[0] == 0.0 and out.column("age")[2] == 1.0
    const, _ = normalize_minmax(t, "bmi")
    assert const.column("bmi") == [0.0, 0.0, 0.0]
    unit = table([(0.0, 1.0, "F", 0), (1.0, 1.0, "F", 0)])
    assert normalize_minmax(unit, "age")[0].column("age") == [0.0, 1.0]
    with pytest.raises(NullPresent):
        normalize_minmax(table([(None, 1.0, "F", 0)]), "age")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1e4, 1e4), min_size=1, max_size=40))
def test_minmax_range_and_inverse(values):
    t = table([(v, 0.0, "F", 0) for v in values])
    out, bounds = normalize_minmax(t, "age")
    scaled = np.array(out.column("age"))
    assert ((scaled >= 0) & (scaled <= 1)).all()
    if bounds[1] > bounds[0]:
        assert np.allclose(denormalize_minmax(scaled, bounds), values, atol=1e-9 * max(1.0, np.abs(values).max()))


def test_histogram_examples():
    t = table([(float(v), 0.0, "F", 0) for v in (0, 1, 2, 3)])
    h = histogram(t, "age", 2)
    assert h.frequencies == (2, 2)
    assert h.midpoints == [0.75, 2.25]
    assert h.to_csv().splitlines()[0] == "bin_midpoint,frequency"
    assert json.loads(h.to_json())["frequencies"] == [2, 2]
    with pytest.raises(ZeroBins):
        histogram(t, "age", 0)


def test_categorical_histogram_modal_share():
    t = table([(0.0, 0.0, "F", 0)] * 59 + [(0.0, 0.0, "M", 0)] * 41)
    h = histogram(t, "sex")
    assert h.categories == ("F", "M")
    assert modal_category(h) == ("F", pytest.approx(0.59))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.one_of(st.none(), st.floats(-50, 50)), min_size=1, max_size=50), st.randoms())
def test_histogram_conservation_and_permutation(values, rnd):
    if all(v is None for v in values):
        return
    t = table([(v, 0.0, "F", 0) for v in values])
    h = histogram(t, "age", 5)
    assert sum(h.frequencies) == sum(v is not None for v in values)
    assert all(a < b for a, b in zip(h.bin_edges, h.bin_edges[1:]))
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert histogram(table([(v, 0.0, "F", 0) for v in shuffled]), "age", 5).frequencies == h.frequencies


def test_correlation_matrix_against_direct_formula():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(50, 3))
    corr, flags = correlation_matrix(X)
    for a in range(3):
        for b in range(3):
            xa, xb = X[:, a] - X[:, a].mean(), X[:, b] - X[:, b].mean()
            r = (xa @ xb) / np.sqrt((xa @ xa) * (xb @ xb))
            assert corr[a, b] == pytest.approx(r, abs=1e-12)
    assert flags == [False, False, False]
    assert np.array_equal(corr, corr.T)


def test_correlation_duplicate_and_constant_columns():
    rng = np.random.default_rng(1)
    x = rng.normal(size=30)
    corr, flags = correlation_matrix(np.column_stack([x, x, np.ones(30)]))
    assert corr[0, 1] == pytest.approx(1.0)
    assert flags == [False, False, True]
    assert (corr[2] == 0).all() and (corr[:, 2] == 0).all()
    assert ((corr >= -1) & (corr <= 1)).all()


def test_preprocess_table_report(synthetic_table):
    out, report = preprocess_table(synthetic_table)
    assert out.null_count() == 0
    assert report.imputed_count["bmi"] == synthetic_table.null_count("bmi")
    assert report.rows_in - report.dropped_rows == report.rows_out == out.n_rows
    assert report.duplicate_rows == 0
    age = np.array(out.column("age"))
    assert age.min() == 0.0 and age.max() == 1.0
    doc = json.loads(report.to_json())
    assert set(doc) >= {"imputed_count", "dropped_rows", "duplicate_rows", "normalization_bounds"}
