"""Semi-Markov continuous-time random walks and their fractional Kolmogorov equations."""

from ._core import (
    DomainError,
    HypothesisError,
    Model,
    NumericError,
    ValidationError,
    expm_grid,
    heat_forward,
    invert_laplace,
    mittag_leffler,
    ml_density,
    ml_survival,
    monte_carlo,
    solve,
)


def constant(value):
    return lambda x: value


def two_region(left, right, interface=0.0):
    return lambda x: left if x < interface else right


__all__ = [
    "DomainError",
    "HypothesisError",
    "Model",
    "NumericError",
    "ValidationError",
    "constant",
    "expm_grid",
    "heat_forward",
    "invert_laplace",
    "mittag_leffler",
    "ml_density",
    "ml_survival",
    "monte_carlo",
    "solve",
    "two_region",
]
