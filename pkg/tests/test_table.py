import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tabforge.errors import (
    DegenerateRatio,
    EmptyClass,
    HeaderMismatch,
    MissingFile,
    NoTargetColumn,
    NullPresent,
    SingleClass,
    UnparsableCell,
)
from tabforge.table import (
    STROKE_SCHEMA,
    ColumnKind,
    ColumnSchema,
    Table,
    label_encode,
    load_csv,
    load_schema,
    oversample_minority,
    train_test_split,
    write_csv,
)

HEADER = ",".join(c.name for c in STROKE_SCHEMA)
ROW_A = "9046,Male,67,0,1,Yes,Private,Urban,228.69,36.6,formerly smoked,1"
ROW_B = "51676,Female,61,0,0,Yes,Self-employed,Rural,202.21,N/A,never smoked,1"
ROW_C = "31112,Male,80,0,1,Yes,Private,Rural,105.92,32.5,never smoked,0"


def write(tmp_path, lines, name="data.csv"):
    p = tmp_path / name
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return p


def test_load_parses_cells_and_na(tmp_path):
    t = load_csv(write(tmp_path, [HEADER, ROW_A, ROW_B]))
    assert t.n_rows == 2 and t.n_columns == 12
    assert t.rows[0][2] == 67.0 and isinstance(t.rows[0][2], float)
    assert t.rows[0][3] == 0 and isinstance(t.rows[0][3], int)
    assert t.rows[1][t.index_of("bmi")] is None
    assert t.null_count("bmi") == 1


def test_header_only_file_gives_empty_table(tmp_path):
    t = load_csv(write(tmp_path, [HEADER]))
    assert t.n_rows == 0


def test_unparsable_cell_reports_row_and_column(tmp_path):
    bad = ROW_B.replace(",61,", ",abc,")
    with pytest.raises(UnparsableCell) as info:
        load_csv(write(tmp_path, [HEADER, bad, ROW_C]))
    assert info.value.row == 2
    assert info.value.column == "age"


def test_missing_file_and_header_mismatch(tmp_path):
    with pytest.raises(MissingFile):
        load_csv(tmp_path / "nope.csv")
    with pytest.raises(HeaderMismatch):
        load_csv(write(tmp_path, [HEADER.replace("bmi", "BMI"), ROW_A]))
    with pytest.raises(HeaderMismatch):
        load_csv(write(tmp_path, [HEADER + ",extra", ROW_A + ",1"]))


def test_unknown_category_is_added_and_recorded(tmp_path):
    t = load_csv(write(tmp_path, [HEADER, ROW_A.replace("Male", "Unknown")]))
    assert t.added_categories == {"gender": ("Unknown",)}
    assert "Unknown" in t.column_schema("gender").allowed_categories


def test_schema_needs_one_target(tmp_path):
    p = tmp_path / "schema.json"
    p.write_text(json.dumps([{"name": "a", "kind": "real"}]))
    with pytest.raises(NoTargetColumn):
        load_schema(p)
    p.write_text(json.dumps([{"name": "a", "kind": "real"}, {"name": "y", "kind": "binary-target"}]))
    assert [c.name for c in load_schema(p)] == ["a", "y"]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 30), st.integers(0, 2**31 - 1))
def test_row_count_equals_lines_minus_header(tmp_path_factory, n, seed):
    from tabforge.synthetic import write_stroke_like_csv

    path = tmp_path_factory.mktemp("csv") / "s.csv"
    write_stroke_like_csv(path, n=n, seed=seed)
    lines = path.read_text().strip("\n").split("\n")
    assert load_csv(path).n_rows == len(lines) - 1


def test_write_then_load_round_trip(tmp_path, synthetic_table):
    p = tmp_path / "rt.csv"
    write_csv(synthetic_table, p)
    again = load_csv(p)
    assert again.rows == synthetic_table.rows


def test_label_encode_lexicographic_codes():
    t = Table(
        STROKE_SCHEMA,
        [
            (1, "Male", 50.0, 0, 0, "Yes", "Private", "Urban", 90.0, 25.0, "smokes", 0),
            (2, "Other", 40.0, 1, 0, "No", "children", "Rural", 80.0, 20.0, "Unknown", 1),
        ],
    )
    m = label_encode(t)
    assert m.encoding_map["gender"] == {"Female": 0, "Male": 1, "Other": 2}
    assert m.encoding_map["work_type"]["Self-employed"] == 3
    assert m.encoding_map["work_type"]["children"] == 4
    assert m.feature_names == tuple(c.name for c in STROKE_SCHEMA[1:-1])
    assert m.n_features == 10
    assert m.target.tolist() == [0, 1]
    assert m.features[1, 0] == 2.0


def test_label_encode_numeric_identity_and_nulls():
    schema = (ColumnSchema("a", ColumnKind.REAL), ColumnSchema("b", ColumnKind.INTEGER), ColumnSchema("y", "binary-target"))
    rows = [(0.5, 3, 0), (-1.25, 7, 1), (2.0, 1, 1)]
    m = label_encode(Table(schema, rows))
    assert np.array_equal(m.features, np.array([[0.5, 3], [-1.25, 7], [2.0, 1]]))
    with pytest.raises(NullPresent):
        label_encode(Table(schema, [(None, 1, 0)]))


def test_label_encode_round_trip(synthetic_table):
    from tabforge.preprocess import impute_nulls, ImputationPolicy

    t, _ = impute_nulls(synthetic_table, ImputationPolicy("bmi"))
    m = label_encode(t)
    for col, mapping in m.encoding_map.items():
        j = m.feature_names.index(col)
        assert m.decode(col, m.features[:, j]) == t.column(col)
        assert sorted(mapping.values()) == list(range(len(mapping)))


def test_split_sizes():
    y = np.r_[np.zeros(4861, int), np.ones(249, int)]
    s = train_test_split(y, 0.8, seed=1)
    assert (len(s.train), len(s.test)) == (4088, 1022)
    s10 = train_test_split(np.r_[np.zeros(7, int), np.ones(3, int)], 0.8, seed=0)
    assert (len(s10.train), len(s10.test)) == (8, 2)


def test_split_deterministic_and_errors():
    y = np.r_[np.zeros(50, int), np.ones(10, int)]
    a, b = train_test_split(y, 0.7, 5), train_test_split(y, 0.7, 5)
    assert np.array_equal(a.train, b.train) and np.array_equal(a.test, b.test)
    with pytest.raises(DegenerateRatio):
        train_test_split(y, 1.0)
    with pytest.raises(DegenerateRatio):
        train_test_split(y, 0.001)
    with pytest.raises(EmptyClass):
        train_test_split(np.zeros(10, int), 0.5)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(2, 300),
    st.floats(0.05, 0.95),
    st.integers(0, 2**32 - 1),
    st.floats(0.01, 0.99),
    st.booleans(),
)
def test_split_partitions_exactly(n, ratio, seed, pos_rate, stratified):
    rng = np.random.default_rng(seed)
    y = (rng.random(n) < pos_rate).astype(int)
    y[0], y[-1] = 0, 1
    n_train = int(np.floor(ratio * n))
    if n_train in (0, n):
        with pytest.raises(DegenerateRatio):
            train_test_split(y, ratio, seed, stratified)
        return
    s = train_test_split(y, ratio, seed, stratified)
    assert len(s.train) == n_train
    assert np.array_equal(np.sort(np.r_[s.train, s.test]), np.arange(n))
    if stratified:
        overall = y.mean()
        assert abs(y[s.train].mean() - overall) < 1 / len(s.train)
        assert abs(y[s.test].mean() - overall) < 1 / len(s.test) + 1e-12


def test_stratified_test_prevalence_band():
    for seed in range(20):
        y = np.zeros(1000, int)
        y[:50] = 1
        s = train_test_split(y, 0.8, seed)
        assert 0.04 <= y[s.test].mean() <= 0.06


def test_oversample_examples():
    X = np.arange(100, dtype=float)[:, None]
    y = np.r_[np.zeros(95, int), np.ones(5, int)]
    Xo, yo = oversample_minority(X, y, seed=0)
    assert np.bincount(yo).tolist() == [95, 95]
    Xb, yb = oversample_minority(X[:10], np.r_[np.zeros(5, int), np.ones(5, int)], seed=0)
    assert np.array_equal(Xb, X[:10]) and yb.tolist() == [0] * 5 + [1] * 5
    with pytest.raises(SingleClass):
        oversample_minority(X, np.zeros(100, int))


def test_oversample_appends_copies_of_positives():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(10, 2))
    y = np.r_[np.zeros(7, int), np.ones(3, int)]
    Xo, yo = oversample_minority(X, y, seed=11)
    assert int(yo.sum()) == 7
    originals = {tuple(r) for r in X[y == 1]}
    assert all(tuple(r) in originals for r in Xo[10:])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_oversample_prefix_and_balance(n0, n1, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n0 + n1, 3))
    y = rng.permutation(np.r_[np.zeros(n0, int), np.ones(n1, int)])
    Xo, yo = oversample_minority(X, y, seed)
    assert np.array_equal(Xo[: len(y)], X) and np.array_equal(yo[: len(y)], y)
    assert (yo == 0).sum() == (yo == 1).sum() == max(n0, n1)
    Xo2, _ = oversample_minority(X, y, seed)
    assert np.array_equal(Xo, Xo2)
