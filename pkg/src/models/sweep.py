"""Sweep configuration and numerical tolerances."""

import json
import math
from pathlib import Path
from typing import Any, Literal, Self

from pydantic import BaseModel, Field, field_validator, model_validator

from ..errors import StateValidationError
from .records import ModelName


class Tolerances(BaseModel):
    """Every numerical knob used by the solvers and analysis."""

    validation: float = Field(default=1e-12, gt=0)
    parity: float = Field(default=1e-8, gt=0)
    eigensolver: float = Field(default=1e-10, gt=0)
    n_tr_convergence: float = Field(default=1e-8, gt=0)
    n_tr_start: int = Field(default=8, ge=1)
    n_tr_step: int = Field(default=4, ge=1)
    n_tr_max: int = Field(default=60, ge=1)
    optimizer: float = Field(default=1e-10, gt=0)
    derivative_step: float = Field(default=1e-3, gt=0)  # units of lambda_c
    derivative: float = Field(default=1e-3, gt=0)


def uniform_steps(lo: float, hi: float, spacing: float) -> int:
    """Number of grid points covering [lo, hi] at (close to) the given spacing."""
    return max(2, round((hi - lo) / spacing) + 1)


class SweepConfig(BaseModel):
    """Parameter sweep description, loadable from a JSON document."""

    model: ModelName
    n_atoms: list[int] = Field(default_factory=list)
    # (lo, hi) alone spaces the grid at derivative_step * lambda_c
    lambda_range: tuple[float, float, int] | tuple[float, float]
    lambda_units: Literal["absolute", "critical"] = "absolute"
    omega: float = Field(default=1.0, gt=0)
    delta: float = Field(default=1.0, gt=0)
    gamma: float = Field(default=0.0, ge=0, lt=1)
    n_tr: int | Literal["auto"] = "auto"
    tolerances: Tolerances = Field(default_factory=Tolerances)
    output_path: Path = Path("results/sweep.csv")
    format: Literal["csv", "json"] = "csv"
    parallelism: int = Field(default=1, ge=1)
    compute_derivative: bool = True
    refine_near_critical: bool = False
    refine_levels: int = Field(default=6, ge=1)
    plot: bool = False
    min_fit_n: int | None = None
    extremum_window: tuple[float, float] | None = None  # units of lambda_c
    locate_extrema: bool = True

    @field_validator("n_atoms", mode="before")
    @classmethod
    def listify(cls, value: Any) -> Any:
        if isinstance(value, int):
            return [value]
        return value

    @model_validator(mode="after")
    def check_ranges(self) -> Self:
        lo, hi = self.lambda_range[:2]
        if len(self.lambda_range) == 3 and self.lambda_range[2] < 2:
            raise StateValidationError(
                "lambda_range needs at least two steps", steps=self.lambda_range[2]
            )
        if not hi > lo or lo < 0:
            raise StateValidationError("lambda_range must be a nonempty range in [0, inf)")
        if self.is_finite_size:
            if not self.n_atoms:
                raise StateValidationError("finite-size sweeps need n_atoms")
            if any(n < 2 for n in self.n_atoms):
                raise StateValidationError("n_atoms must be at least 2")
        if isinstance(self.n_tr, int) and self.n_tr < 1:
            raise StateValidationError("n_tr must be positive")
        return self

    @property
    def is_finite_size(self) -> bool:
        return self.model in ("dicke", "lmg")

    @property
    def base_model(self) -> Literal["dicke", "lmg"]:
        return "dicke" if self.model in ("dicke", "thermo_dicke") else "lmg"

    @property
    def lambda_c(self) -> float:
        if self.base_model == "dicke":
            return math.sqrt(self.omega * self.delta) / 2
        return 1.0

    @property
    def grid_steps(self) -> int:
        """Explicit step count, else enough points for a derivative_step spacing."""
        if len(self.lambda_range) == 3:
            return int(self.lambda_range[2])
        lo, hi = self.lambda_range[:2]
        span = hi - lo if self.lambda_units == "critical" else (hi - lo) / self.lambda_c
        return uniform_steps(0.0, span, self.tolerances.derivative_step)

    @classmethod
    def load(cls, path: Path | None, overrides: dict[str, Any] | None = None) -> "SweepConfig":
        """Read a JSON recipe; non-None overrides replace its fields."""
        data = json.loads(Path(path).read_text()) if path else {}
        for key, value in (overrides or {}).items():
            if value is not None:
                data[key] = value
        return cls.model_validate(data)
