"""Sparse linear/logistic regression toolkit.

Coordinate-descent lasso with cross-validated penalty selection, plus three
gradient-trained variants of the same objective (standard, restricted,
voting), a synthetic benchmark generator, and support-recovery metrics.
"""

from ._nlasso import (
    FittedModel,
    NlassoError,
    fit_restricted,
    fit_standard,
    fit_statistical,
    fit_voting,
    lambda_grid,
    paired_t_test,
    refit_unpenalized,
    selected_fraction,
    simulate,
    soft_threshold,
    support_precision,
    support_recall,
    test_accuracy,
    test_mse,
)

__all__ = [
    "FittedModel",
    "NlassoError",
    "fit_restricted",
    "fit_standard",
    "fit_statistical",
    "fit_voting",
    "lambda_grid",
    "paired_t_test",
    "refit_unpenalized",
    "selected_fraction",
    "simulate",
    "soft_threshold",
    "support_precision",
    "support_recall",
    "test_accuracy",
    "test_mse",
]
