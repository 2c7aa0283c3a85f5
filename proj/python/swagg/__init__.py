"""Sliding-window aggregate bound estimation and feature ranking."""

from ._swagg import (
    AssumptionParams,
    SwaggError,
    bounds,
    count_distribution,
    exit_prob,
    fit_parameters,
    forest_importance,
    incoming_prob,
    next_state_coeffs,
    rank_recall,
    simulate_chain,
    spectral,
    stationary_mixture,
)

__all__ = [
    "AssumptionParams",
    "SwaggError",
    "bounds",
    "count_distribution",
    "exit_prob",
    "fit_parameters",
    "forest_importance",
    "incoming_prob",
    "next_state_coeffs",
    "rank_recall",
    "simulate_chain",
    "spectral",
    "stationary_mixture",
]
