"""Pydantic records for states, parameters, solutions and sweep output."""

from .collective import CollectiveExpectations
from .mean_field import MeanField
from .params import DickeParams, LmgParams
from .records import (
    CSV_COLUMNS,
    CorrelationCurve,
    CorrelationPoint,
    ScalingFit,
    ScalingReport,
    SizeSummary,
)
from .solution import GroundStateSolution
from .sweep import SweepConfig, Tolerances, uniform_steps
from .xstate import CorrelationResult, MeasurementAngles, XState

__all__ = [
    # States
    "XState",
    "MeasurementAngles",
    "CorrelationResult",
    "CollectiveExpectations",
    # Solvers
    "DickeParams",
    "LmgParams",
    "GroundStateSolution",
    "MeanField",
    # Output
    "CSV_COLUMNS",
    "CorrelationPoint",
    "CorrelationCurve",
    "ScalingFit",
    "ScalingReport",
    "SizeSummary",
    # Config
    "SweepConfig",
    "Tolerances",
    "uniform_steps",
]
