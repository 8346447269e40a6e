"""Cross-validation, grid search, metrics and evaluation regimes."""

from .cv import CVResult, FoldPlan, ResampleMode, cross_val_accuracy, kfold_plan
from .grid import TUNING_BASE, GridCell, GridResult, GridSpec, grid_search, reference_grids
from .metrics import (
    ConfusionMatrix,
    MetricsReport,
    RocCurve,
    confusion,
    metrics,
    roc_auc,
    roc_curve,
)
from .regimes import LEAKAGE_WARNING, EvaluationRegime, ModelOutcome, RegimeResult, run_regime
from .seeds import derive_seed

__all__ = [
    "TUNING_BASE",
    "CVResult",
    "ConfusionMatrix",
    "EvaluationRegime",
    "FoldPlan",
    "GridCell",
    "GridResult",
    "GridSpec",
    "LEAKAGE_WARNING",
    "MetricsReport",
    "ModelOutcome",
    "RegimeResult",
    "ResampleMode",
    "RocCurve",
    "confusion",
    "cross_val_accuracy",
    "derive_seed",
    "grid_search",
    "kfold_plan",
    "metrics",
    "roc_auc",
    "roc_curve",
    "run_regime",
    "reference_grids",
]
