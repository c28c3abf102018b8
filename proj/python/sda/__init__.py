"""Smoothing with data association."""

from ._sda import (
    SdaError,
    assign,
    eval,
    fit_single,
    generate,
    h0_norm,
    hs_distance,
    objective_empirical,
    penalty,
    solve,
)

__all__ = [
    "SdaError",
    "assign",
    "eval",
    "fit_single",
    "generate",
    "h0_norm",
    "hs_distance",
    "objective_empirical",
    "penalty",
    "solve",
]
