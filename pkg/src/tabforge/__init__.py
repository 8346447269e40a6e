"""Tabular binary classification toolkit: preprocessing, voting feature selection,
from-scratch classifiers, cross-validated grid search and evaluation reports."""

__version__ = "0.1.0"
