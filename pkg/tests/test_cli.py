import json

import pytest

from tabforge.cli import build_parser, main, resolve_config
from tabforge.errors import ConfigError
from tabforge.synthetic import write_stroke_like_csv
from tabforge.tuning import EvaluationRegime, ResampleMode

FAST_SELECTION = """
[selection]
rf_importance.n_estimators = 5
gbm_importance.min_estimators = 5
bee_colony.colony_size = 4
bee_colony.max_iterations = 3
"""


@pytest.fixture(scope="module")
def setup(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    data = write_stroke_like_csv(root / "stroke.csv", n=500, seed=5)
    ini = root / "run.ini"
    ini.write_text(f"[run]\ndata = stroke.csv\nseed = 7\nk = 3\nmodels = gaussian_nb\n{FAST_SELECTION}")
    return root, data, str(ini)


def args(*argv):
    return build_parser().parse_args(list(argv))


def test_seed_precedence(setup):
    _, _, ini = setup
    assert resolve_config(args("run-all", "--config", ini), environ={}).seed == 7
    assert resolve_config(args("run-all", "--config", ini), environ={"TABFORGE_SEED": "11"}).seed == 11
    assert resolve_config(args("run-all", "--config", ini, "--seed", "13"), environ={"TABFORGE_SEED": "11"}).seed == 13
    with pytest.raises(ConfigError):
        resolve_config(args("run-all", "--config", ini), environ={"TABFORGE_SEED": "x"})


def test_flag_overrides(setup):
    _, data, ini = setup
    cfg = resolve_config(
        args("evaluate", "--config", ini, "--regime", "cv-only", "--resample", "pre-split",
             "--models", "knn, svm_linear", "--data", str(data), "--out", "elsewhere"),
        environ={},
    )
    assert cfg.regime is EvaluationRegime.CV_WITHOUT_GRID
    assert cfg.resample is ResampleMode.PRE_SPLIT
    assert cfg.models == ("knn", "svm_linear")
    assert cfg.out == "elsewhere"


def test_run_all_exit_zero_and_summary(setup, tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("TABFORGE_SEED", raising=False)
    _, _, ini = setup
    code = main(["run-all", "--config", ini, "--regime", "no-cv", "--out", str(tmp_path)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert "metrics_no_cv_no_grid.csv" in summary["files"]
    assert set(summary["no_cv_no_grid"]) == {"gaussian_nb"}
    assert summary["kept_features"]
    prov = json.loads((tmp_path / "provenance.json").read_text())
    assert prov["seed"] == 7


@pytest.mark.parametrize(
    "command, present, absent",
    [
        ("ingest", "ingest.json", "preprocess.json"),
        ("preprocess", "preprocess.json", "votes.csv"),
        ("select-features", "votes.csv", "metrics_cv_with_grid.csv"),
    ],
)
def test_subcommands_stop_at_their_stage(setup, tmp_path, command, present, absent):
    _, _, ini = setup
    assert main([command, "--config", ini, "--out", str(tmp_path)]) == 0
    assert (tmp_path / present).exists()
    assert not (tmp_path / absent).exists()


def test_compare_regimes_command(setup, tmp_path):
    _, _, ini = setup
    assert main(["compare-regimes", "--config", ini, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "comparison.csv").read_text().splitlines()
    assert lines[0] == "model,regime,metric,value"
    assert len(lines) == 1 + 15


def test_config_error_exits_two(tmp_path, capsys):
    assert main(["run-all", "--config", str(tmp_path / "missing.ini")]) == 2
    assert "config error" in capsys.readouterr().err
    bad = tmp_path / "bad.ini"
    bad.write_text("[selection]\nmin_votes = 9\n")
    assert main(["run-all", "--config", str(bad), "--data", str(bad)]) == 2


def test_stage_error_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    out = tmp_path / "out"
    assert main(["ingest", "--data", str(bad), "--out", str(out)]) == 1
    assert "stage 'ingest' failed" in capsys.readouterr().err
    assert (out / "FAILED").exists()


def test_unknown_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["dance"])
    assert info.value.code == 2
