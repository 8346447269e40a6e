import json
import os

import numpy as np
import pytest

from tabforge.config import RunConfig, load_config, parse_config
from tabforge.errors import ConfigError, StageError
from tabforge.featsel import SelectorVerdict, VoteTally, tally_votes
from tabforge.pipeline import FAILED_MARKER, compare_regimes, emit_vote_table, run_pipeline
from tabforge.synthetic import write_stroke_like_csv
from tabforge.table import read_records
from tabforge.tuning import EvaluationRegime, ResampleMode

FAST_INI = """
[run]
data = {data}
regime = cv_with_grid
resample = fold_safe
seed = 3
k = 3
models = gaussian_nb, knn, decision_tree
out = {out}

[selection]
min_votes = 4
rf_importance.n_estimators = 5
gbm_importance.min_estimators = 5
bee_colony.colony_size = 4
bee_colony.max_iterations = 3

[grid.knn]
n_neighbors = [3, 5]
weights = ["uniform"]
p = [2]

[grid.decision_tree]
max_depth = [3, 5]
min_samples_split = [2]
min_samples_leaf = [1]
"""


@pytest.fixture(scope="module")
def data_csv(tmp_path_factory):
    return write_stroke_like_csv(tmp_path_factory.mktemp("data") / "stroke.csv", n=600, seed=11)


def fast_config(data, out, **extra):
    cfg = parse_config(FAST_INI.format(data=data, out=out))
    for key, value in extra.items():
        setattr(cfg, key, value)
    return cfg


# -- config ----------------------------------------------------------------------

def test_config_grammar(tmp_path, data_csv):
    cfg = fast_config(data_csv, tmp_path / "o")
    assert cfg.models == ("gaussian_nb", "knn", "decision_tree")
    assert cfg.k == 3 and cfg.seed == 3
    assert cfg.selector_params["bee_colony"]["colony_size"] == 4
    assert cfg.grids["knn"] == {"n_neighbors": [3, 5], "weights": ["uniform"], "p": [2]}
    cfg.validate()
    assert cfg.regime is EvaluationRegime.CV_WITH_GRID
    assert cfg.resample is ResampleMode.FOLD_SAFE


def test_config_relative_paths_resolve_against_file(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[run]\ndata = sub/d.csv\nregime = no-cv\n")
    cfg = load_config(ini)
    assert cfg.data == str(tmp_path / "sub" / "d.csv")
    assert cfg.regime is EvaluationRegime.NO_CV_NO_GRID


@pytest.mark.parametrize(
    "text",
    [
        "[selection]\nmin_votes = 9\n",
        "[selection]\nselectors = pearson, chi2\nmin_votes = 3\n",
        "[selection]\nselectors = pearson, magic\n",
        "[selection]\nrfe.colour = 3\n",
        "[run]\nk = 1\n",
        "[run]\nseed = -4\n",
        "[run]\nsplit_ratio = 1.5\n",
        "[run]\nmodels = knn, oracle\n",
        "[run]\nregime = sometimes\n",
        "[grid.knn]\nn_neighbors = [0]\n",
        "[params.knn]\nn_neighbors = -1\n",
    ],
)
def test_invalid_config_is_rejected(tmp_path, data_csv, text):
    cfg = parse_config(text)
    cfg.data = str(data_csv)
    with pytest.raises(ConfigError):
        cfg.validate()


@pytest.mark.parametrize("text", ["[nonsense]\na = 1\n", "[run]\ncolour = red\n", "[selection]\nfoo = 1\n", "not ini"])
def test_malformed_config_raises(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_dataset_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig(data=str(tmp_path / "absent.csv")).validate()
    with pytest.raises(ConfigError):
        RunConfig().validate()


def test_config_hash_ignores_output_directory(tmp_path, data_csv):
    a = fast_config(data_csv, tmp_path / "a")
    b = fast_config(data_csv, tmp_path / "b")
    assert a.hash() == b.hash()
    for change in ({"seed": 4}, {"k": 4}, {"min_votes": 3}, {"models": ("knn",)}):
        c = fast_config(data_csv, tmp_path / "a", **change)
        assert c.hash() != a.hash()


# -- pipeline --------------------------------------------------------------------

@pytest.fixture(scope="module")
def full_run(tmp_path_factory, data_csv):
    out = tmp_path_factory.mktemp("run")
    return run_pipeline(fast_config(data_csv, out))


def test_run_all_writes_every_artifact(full_run):
    files = set(full_run.files)
    for name in (
        "ingest.json", "preprocess.json", "votes.csv", "votes.json", "selectors.json",
        "metrics_cv_with_grid.csv", "metrics_cv_with_grid.json", "provenance.json",
        "roc_knn.csv", "grid_knn.csv", "grid_decision_tree.csv", "hist_age.csv",
    ):
        assert name in files
        assert os.path.exists(full_run.path(name))
    assert not os.path.exists(full_run.path(FAILED_MARKER))


def test_every_emitted_csv_reparses(full_run):
    csvs = [n for n in full_run.files if n.endswith(".csv")]
    assert csvs
    for name in csvs:
        header, rows = read_records(full_run.path(name))
        assert header and all(len(r) == len(header) for r in rows), name


def test_metrics_csv_shape(full_run):
    header, rows = read_records(full_run.path("metrics_cv_with_grid.csv"))
    assert header == ["model", "accuracy", "precision", "recall", "f1", "roc_auc", "status"]
    assert [r[0] for r in rows] == ["gaussian_nb", "knn", "decision_tree"]
    assert all(r[-1] == "ok" for r in rows)
    assert all(0.0 <= float(r[1]) <= 1.0 for r in rows)


def test_vote_table_matches_selector_verdicts(full_run):
    verdicts = json.loads(open(full_run.path("selectors.json")).read())
    assert [v["selector"] for v in verdicts] == [
        "pearson", "chi2", "rfe", "l1_logistic", "rf_importance", "gbm_importance", "lasso", "bee_colony"
    ]
    header, rows = read_records(full_run.path("votes.csv"))
    assert header == ["SL", "Feature", *[v["selector"] for v in verdicts], "Total"]
    for row in rows:
        expected = [v["selected"][v["features"].index(row[1])] for v in verdicts]
        assert row[2:-1] == [str(e) for e in expected]
        assert int(row[-1]) == sum(expected)
    totals = [int(r[-1]) for r in rows]
    assert totals == sorted(totals, reverse=True)


def test_provenance_contents(full_run):
    prov = json.loads(open(full_run.path("provenance.json")).read())
    assert prov["status"] == "ok"
    assert prov["seed"] == 3
    assert len(prov["config_hash"]) == 64
    assert {"numpy", "scipy", "numba", "python", "tabforge"} <= set(prov["versions"])
    assert "metrics_cv_with_grid.csv" in prov["files"]
    report = json.loads(open(full_run.path("preprocess.json")).read())["report"]
    assert report["rows_in"] == 600
    assert prov["split"]["train"] + prov["split"]["test"] == report["rows_out"]


def test_run_all_is_byte_deterministic(tmp_path, data_csv, full_run):
    again = run_pipeline(fast_config(data_csv, tmp_path))
    for name in ("metrics_cv_with_grid.csv", "votes.csv", "roc_knn.csv", "grid_knn.csv"):
        assert open(again.path(name), "rb").read() == open(full_run.path(name), "rb").read()


def test_until_stops_early(tmp_path, data_csv):
    bundle = run_pipeline(fast_config(data_csv, tmp_path), until="ingest")
    assert "ingest.json" in bundle.files and "votes.csv" not in bundle.files
    summary = json.loads(open(bundle.path("ingest.json")).read())
    assert summary["rows"] == 600 and summary["columns"] == 12
    with pytest.raises(ValueError):
        run_pipeline(fast_config(data_csv, tmp_path), until="dance")


def test_failed_stage_leaves_marker(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    out = tmp_path / "out"
    cfg = RunConfig(data=str(bad), out=str(out), models=("knn",))
    with pytest.raises(StageError) as info:
        run_pipeline(cfg)
    assert info.value.stage == "ingest"
    marker = (out / FAILED_MARKER).read_text()
    assert "stage: ingest" in marker and "cause:" in marker
    prov = json.loads((out / "provenance.json").read_text())
    assert prov["status"] == "failed" and prov["failed_stage"] == "ingest"


def test_selection_without_survivors_fails_the_select_stage(tmp_path, data_csv):
    cfg = fast_config(data_csv, tmp_path, selectors=("pearson",), min_votes=1)
    cfg.selector_params["pearson"] = {"threshold": 2.0}
    with pytest.raises(StageError) as info:
        run_pipeline(cfg)
    assert info.value.stage == "select"
    assert os.path.exists(tmp_path / "votes.csv")
    assert "stage: select" in (tmp_path / FAILED_MARKER).read_text()


def test_compare_regimes_long_format(tmp_path, data_csv):
    cfg = fast_config(data_csv, tmp_path, models=("gaussian_nb",))
    bundle = compare_regimes(cfg)
    header, rows = read_records(bundle.path("comparison.csv"))
    assert header == ["model", "regime", "metric", "value"]
    assert len(rows) == 15
    assert {r[1] for r in rows} == {r.value for r in EvaluationRegime}
    assert {r[2] for r in rows} == {"accuracy", "precision", "recall", "f1", "roc_auc"}
    assert all(r[0] == "gaussian_nb" for r in rows)


# -- vote table export -----------------------------------------------------------

def test_empty_tally_emits_header_only(tmp_path):
    tally = tally_votes([], min_votes=0)
    path = emit_vote_table(tally, tmp_path / "v.csv")
    header, rows = read_records(path)
    assert header[:2] == ["SL", "Feature"] and header[-1] == "Total"
    assert rows == []


def test_vote_table_export(tmp_path):
    T, F = True, False
    table = {
        "Age": [T] * 8,
        "Gender": [T, F, F, F, F, F, F, F],
        "BMI": [T, F, F, F, T, T, F, F],
    }
    names = tuple(table)
    d = np.array([table[n] for n in names])
    selectors = ("pearson", "chi2", "rfe", "l1_logistic", "rf_importance", "gbm_importance", "lasso", "bee_colony")
    verdicts = [SelectorVerdict(s, names, d[:, k], d[:, k].astype(float)) for k, s in enumerate(selectors)]
    tally = tally_votes(verdicts, min_votes=4)
    assert isinstance(tally, VoteTally)
    header, rows = read_records(emit_vote_table(tally, tmp_path / "v.csv"))
    assert len(header) == 11
    assert [(r[1], int(r[-1])) for r in rows] == [("Age", 8), ("BMI", 3), ("Gender", 1)]
    assert [r[0] for r in rows] == ["1", "2", "3"]
