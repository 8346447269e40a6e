"""Eight feature-selection procedures and their vote fusion."""

from .bee_colony import BeeColonyConfig, MaskFitness, select_bee_colony
from .embedded import (
    GbmSelectorConfig,
    select_gbm_importance,
    select_l1_logistic,
    select_lasso,
    select_rf_importance,
    select_rfe,
)
from .filters import chi2_statistic, contingency, pearson_r, quartile_bins, select_chi2, select_pearson
from .verdict import ALL_SELECTORS, Selector, SelectorVerdict, median_rule, standardize
from .voting import VoteTally, tally_votes

__all__ = [
    "ALL_SELECTORS",
    "BeeColonyConfig",
    "GbmSelectorConfig",
    "MaskFitness",
    "Selector",
    "SelectorVerdict",
    "VoteTally",
    "chi2_statistic",
    "contingency",
    "median_rule",
    "pearson_r",
    "quartile_bins",
    "select_bee_colony",
    "select_chi2",
    "select_gbm_importance",
    "select_l1_logistic",
    "select_lasso",
    "select_pearson",
    "select_rf_importance",
    "select_rfe",
    "standardize",
    "tally_votes",
]
