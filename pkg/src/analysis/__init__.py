"""Finite-size scaling analysis of correlation curves."""

from .scaling import (
    curve_values,
    derivative,
    fit_log2_linear,
    fit_power_law,
    locate_extremum,
)

__all__ = [
    "curve_values",
    "derivative",
    "fit_log2_linear",
    "fit_power_law",
    "locate_extremum",
]
