"""Sweep output records: points, curves and scaling fits."""

from typing import Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import StateValidationError

ModelName = Literal["dicke", "lmg", "thermo_dicke", "thermo_lmg"]

# Fixed CSV column order through n_tr_used, then extra measures and run metadata.
CSV_COLUMNS = (
    "model",
    "N",
    "lambda",
    "gamma",
    "omega",
    "delta",
    "discord",
    "classical",
    "mutual_info",
    "concurrence_scaled",
    "d_discord_d_lambda",
    "energy",
    "converged",
    "n_tr_used",
    "d_classical_d_lambda",
    "concurrence_wootters_scaled",
    "tolerance",
    "failure",
)


class CorrelationPoint(BaseModel):
    """One (model, N, lambda, gamma) evaluation."""

    model: ModelName
    n_atoms: int | None = None
    coupling: float
    gamma: float | None = None
    omega: float | None = None
    delta: float | None = None

    discord: float | None = None
    classical: float | None = None
    mutual_info: float | None = None
    concurrence_scaled: float | None = None
    d_discord_d_lambda: float | None = None
    energy: float | None = None

    converged: bool = True
    n_tr_used: int | None = None
    d_classical_d_lambda: float | None = None
    concurrence_wootters_scaled: float | None = None
    tolerance: float | None = None
    failure: str | None = None

    @property
    def sort_key(self) -> tuple[int, float]:
        return (self.n_atoms or 0, self.coupling)

    def to_row(self) -> dict[str, str]:
        """Render as CSV cells; missing values stay empty, never zero."""

        def cell(value: object) -> str:
            if value is None:
                return ""
            if isinstance(value, bool):
                return "true" if value else "false"
            if isinstance(value, float):
                return repr(value)
            return str(value)

        values = {
            "model": self.model,
            "N": self.n_atoms,
            "lambda": self.coupling,
            "gamma": self.gamma,
            "omega": self.omega,
            "delta": self.delta,
            "discord": self.discord,
            "classical": self.classical,
            "mutual_info": self.mutual_info,
            "concurrence_scaled": self.concurrence_scaled,
            "d_discord_d_lambda": self.d_discord_d_lambda,
            "energy": self.energy,
            "converged": self.converged,
            "n_tr_used": self.n_tr_used,
            "d_classical_d_lambda": self.d_classical_d_lambda,
            "concurrence_wootters_scaled": self.concurrence_wootters_scaled,
            "tolerance": self.tolerance,
            "failure": self.failure,
        }
        return {key: cell(values[key]) for key in CSV_COLUMNS}

    @classmethod
    def from_row(cls, row: dict[str, str]) -> "CorrelationPoint":
        def num(key: str) -> float | None:
            return float(row[key]) if row.get(key) else None

        def integer(key: str) -> int | None:
            return int(row[key]) if row.get(key) else None

        return cls(
            model=row["model"],  # type: ignore[arg-type]
            n_atoms=integer("N"),
            coupling=float(row["lambda"]),
            gamma=num("gamma"),
            omega=num("omega"),
            delta=num("delta"),
            discord=num("discord"),
            classical=num("classical"),
            mutual_info=num("mutual_info"),
            concurrence_scaled=num("concurrence_scaled"),
            d_discord_d_lambda=num("d_discord_d_lambda"),
            energy=num("energy"),
            converged=row.get("converged", "true") == "true",
            n_tr_used=integer("n_tr_used"),
            d_classical_d_lambda=num("d_classical_d_lambda"),
            concurrence_wootters_scaled=num("concurrence_wootters_scaled"),
            tolerance=num("tolerance"),
            failure=row.get("failure") or None,
        )


class CorrelationCurve(BaseModel):
    """Correlations of one model and size along a lambda grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    model: ModelName
    n_atoms: int | None = None
    lambda_grid: np.ndarray
    discord: np.ndarray
    classical: np.ndarray
    concurrence_scaled: np.ndarray | None = None

    @model_validator(mode="after")
    def check_arrays(self) -> Self:
        grid = np.asarray(self.lambda_grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise StateValidationError("lambda grid needs at least two points")
        if np.any(np.diff(grid) <= 0):
            raise StateValidationError("lambda grid must be strictly increasing")
        arrays = [self.discord, self.classical]
        if self.concurrence_scaled is not None:
            arrays.append(self.concurrence_scaled)
        for values in arrays:
            values = np.asarray(values, dtype=float)
            if values.shape != grid.shape:
                raise StateValidationError("curve arrays must match the grid length")
            if not np.all(np.isfinite(values)):
                raise StateValidationError("curve values must be finite")
        return self

    @classmethod
    def from_points(cls, points: list[CorrelationPoint]) -> "CorrelationCurve":
        """Build a curve from converged points of a single (model, N) family."""
        usable = sorted(
            (p for p in points if p.discord is not None and p.classical is not None),
            key=lambda p: p.coupling,
        )
        concurrence = [p.concurrence_scaled for p in usable]
        return cls(
            model=usable[0].model,
            n_atoms=usable[0].n_atoms,
            lambda_grid=np.array([p.coupling for p in usable]),
            discord=np.array([p.discord for p in usable], dtype=float),
            classical=np.array([p.classical for p in usable], dtype=float),
            concurrence_scaled=(
                None if any(c is None for c in concurrence) else np.array(concurrence, dtype=float)
            ),
        )


class ScalingFit(BaseModel):
    """Least-squares fit of a finite-size scaling law.

    power_law:   value = coefficient * N ** exponent_or_slope
                 (intercept = ln coefficient, mu = -exponent_or_slope)
    log2_linear: value = exponent_or_slope * log2(N) + intercept
    """

    kind: Literal["power_law", "log2_linear"]
    coefficient: float
    exponent_or_slope: float
    intercept: float
    r_squared: float = Field(ge=0.0, le=1.0)
    n_values: list[int] = Field(min_length=3)
    residuals: list[float] = Field(default_factory=list)

    @property
    def mu(self) -> float:
        return -self.exponent_or_slope

    def predict(self, n: float) -> float:
        if self.kind == "power_law":
            return float(self.coefficient * n**self.exponent_or_slope)
        return float(self.exponent_or_slope * np.log2(n) + self.intercept)


class SizeSummary(BaseModel):
    """Per-size inputs of the scaling fits."""

    n_atoms: int
    discord_at_critical: float
    extremum_lambda: float | None = None
    extremum_value: float | None = None


class ScalingReport(BaseModel):
    """Both scaling fits for one model."""

    model: Literal["dicke", "lmg"]
    lambda_c: float
    sizes: list[SizeSummary]
    power_law: ScalingFit | None = None
    log2_linear: ScalingFit | None = None
    extremum_side: Literal["max", "min"]
