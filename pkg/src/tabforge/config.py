"""Run configuration: an INI file with a fixed, documented set of sections and keys.

Grammar (every key optional; values are JSON literals, bare words are strings)::

    [run]
    data = path/to/healthcare-dataset-stroke-data.csv
    schema = builtin                  ; or a JSON schema file
    regime = cv_with_grid             ; cv_with_grid | no_cv_no_grid | cv_without_grid
    resample = fold_safe              ; fold_safe | pre_split | none
    seed = 0
    k = 5
    split_ratio = 0.8
    models = xgboost_like, random_forest, knn
    out = results

    [selection]
    min_votes = 4
    selectors = pearson, chi2, rfe, l1_logistic, rf_importance, gbm_importance, lasso, bee_colony
    rfe.n_keep = 8                    ; <selector>.<parameter> = value

    [grid.knn]                        ; replaces the knn search space
    n_neighbors = [3, 5]

    [params.xgboost_like]             ; overrides untuned defaults
    n_estimators = 10
"""

from __future__ import annotations

import configparser
import hashlib
import json
import os
from dataclasses import dataclass, field, replace
from typing import Any

from .errors import ConfigError, TabforgeError
from .featsel import ALL_SELECTORS
from .models import ALL_KINDS, estimator_class
from .tuning import EvaluationRegime, GridSpec, ResampleMode

SELECTOR_PARAMS: dict[str, dict[str, Any]] = {
    "pearson": {"threshold": 0.0},
    "chi2": {"alpha": 0.05, "max_levels": 10},
    "rfe": {"n_keep": 8, "step": 10},
    "l1_logistic": {"lam": 1e-3, "threshold_multiplier": 1.25},
    "rf_importance": {"n_estimators": 100, "threshold_multiplier": 1.25},
    "gbm_importance": {
        "threshold_multiplier": 1.0,
        "num_leaves": 32,
        "min_estimators": 500,
        "learning_rate": 0.05,
        "colsample_bytree": 0.2,
        "reg_alpha": 3.0,
        "reg_lambda": 1.0,
        "min_child_weight": 40.0,
    },
    "lasso": {"alpha": 1e-3},
    "bee_colony": {"colony_size": 20, "max_iterations": 50, "abandonment_limit": 10, "fitness_folds": 3},
}

REGIME_ALIASES = {
    "full": EvaluationRegime.CV_WITH_GRID,
    "no-cv": EvaluationRegime.NO_CV_NO_GRID,
    "cv-only": EvaluationRegime.CV_WITHOUT_GRID,
}


@dataclass
class RunConfig:
    data: str | None = None
    schema: str = "builtin"
    regime: EvaluationRegime = EvaluationRegime.CV_WITH_GRID
    resample: ResampleMode = ResampleMode.FOLD_SAFE
    seed: int = 0
    k: int = 5
    split_ratio: float = 0.8
    models: tuple[str, ...] = ALL_KINDS
    out: str = "tabforge-out"
    min_votes: int = 4
    selectors: tuple[str, ...] = ALL_SELECTORS
    selector_params: dict[str, dict[str, Any]] = field(
        default_factory=lambda: {k: dict(v) for k, v in SELECTOR_PARAMS.items()}
    )
    grids: dict[str, dict[str, list]] = field(default_factory=dict)
    params: dict[str, dict[str, Any]] = field(default_factory=dict)

    def validate(self, require_data: bool = True) -> "RunConfig":
        """Check every field; raise :class:`ConfigError` before any work starts."""
        try:
            self.regime = EvaluationRegime(self.regime)
            self.resample = ResampleMode(self.resample)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if require_data:
            if not self.data:
                raise ConfigError("no dataset given (set [run] data or pass --data)")
            if not os.path.exists(self.data):
                raise ConfigError(f"dataset not found: {self.data}")
        if self.schema != "builtin" and not os.path.exists(self.schema):
            raise ConfigError(f"schema file not found: {self.schema}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if not isinstance(self.k, int) or self.k < 2:
            raise ConfigError(f"k must be an integer >= 2, got {self.k!r}")
        if not 0 < float(self.split_ratio) < 1:
            raise ConfigError(f"split_ratio must lie in (0, 1), got {self.split_ratio!r}")
        unknown = [s for s in self.selectors if s not in ALL_SELECTORS]
        if unknown:
            raise ConfigError(f"unknown selectors {unknown}; choose from {list(ALL_SELECTORS)}")
        if not 0 <= self.min_votes <= len(self.selectors):
            raise ConfigError(
                f"min_votes={self.min_votes} must lie in [0, {len(self.selectors)}] "
                f"for {len(self.selectors)} enabled selectors"
            )
        for name, values in self.selector_params.items():
            if name not in SELECTOR_PARAMS:
                raise ConfigError(f"parameters given for unknown selector {name!r}")
            extra = set(values) - set(SELECTOR_PARAMS[name])
            if extra:
                raise ConfigError(f"unknown {name} parameters {sorted(extra)}")
        if not self.models:
            raise ConfigError("no model kinds selected")
        try:
            for kind in self.models:
                estimator_class(kind)
            for kind, values in self.grids.items():
                GridSpec(kind, values)
            for kind, values in self.params.items():
                estimator_class(kind).validate(values)
        except TabforgeError as exc:
            raise ConfigError(str(exc)) from None
        return self

    def grid_overrides(self) -> dict[str, GridSpec]:
        return {kind: GridSpec(kind, values) for kind, values in self.grids.items()}

    def canonical(self) -> dict[str, Any]:
        """Every field that can change results; the output directory is excluded."""
        return {
            "data": os.path.abspath(self.data) if self.data else None,
            "schema": self.schema if self.schema == "builtin" else os.path.abspath(self.schema),
            "regime": EvaluationRegime(self.regime).value,
            "resample": ResampleMode(self.resample).value,
            "seed": self.seed,
            "k": self.k,
            "split_ratio": float(self.split_ratio),
            "models": list(self.models),
            "min_votes": self.min_votes,
            "selectors": list(self.selectors),
            "selector_params": {s: self.selector_params.get(s, {}) for s in sorted(self.selector_params)},
            "grids": self.grids,
            "params": self.params,
        }

    def hash(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()

    def with_overrides(self, **changes) -> "RunConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _value(text: str) -> Any:
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    lowered = text.lower()
    if lowered in ("none", "null"):
        return None
    if lowered in ("true", "false"):
        return lowered == "true"
    return text


def _list(text: str) -> tuple[str, ...]:
    value = _value(text)
    if isinstance(value, list):
        return tuple(str(v) for v in value)
    return tuple(p.strip() for p in str(text).split(",") if p.strip())


_RUN_KEYS = {"data", "schema", "regime", "resample", "seed", "k", "split_ratio", "models", "out"}


def parse_config(text: str, base_dir: str = ".") -> RunConfig:
    """Build a :class:`RunConfig` from INI text; relative paths resolve against ``base_dir``."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    cfg = RunConfig()
    for section in parser.sections():
        items = dict(parser.items(section))
        if section == "run":
            extra = set(items) - _RUN_KEYS
            if extra:
                raise ConfigError(f"unknown [run] keys {sorted(extra)}")
            for key, raw in items.items():
                if key == "models":
                    cfg.models = _list(raw)
                elif key in ("data", "schema", "out"):
                    value = raw.strip()
                    if key != "schema" or value != "builtin":
                        value = os.path.normpath(os.path.join(base_dir, value))
                    setattr(cfg, key, value)
                elif key == "regime":
                    value = str(_value(raw))
                    cfg.regime = REGIME_ALIASES.get(value, value)
                else:
                    setattr(cfg, key, _value(raw))
        elif section == "selection":
            for key, raw in items.items():
                if key == "min_votes":
                    cfg.min_votes = _value(raw)
                elif key == "selectors":
                    cfg.selectors = _list(raw)
                elif "." in key:
                    name, param = key.split(".", 1)
                    cfg.selector_params.setdefault(name, {})[param] = _value(raw)
                else:
                    raise ConfigError(f"unknown [selection] key {key!r}")
        elif section.startswith("grid."):
            kind = section[len("grid."):]
            values = {}
            for key, raw in items.items():
                v = _value(raw)
                values[key] = v if isinstance(v, list) else [v]
            cfg.grids[kind] = values
        elif section.startswith("params."):
            cfg.params[section[len("params."):]] = {k: _value(v) for k, v in items.items()}
        else:
            raise ConfigError(f"unknown config section [{section}]")
    return cfg


def load_config(path: str | os.PathLike) -> RunConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), base_dir=os.path.dirname(os.path.abspath(path)))
