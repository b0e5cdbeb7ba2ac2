"""Ground-state eigenpair returned by the finite-N solvers."""

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from ..errors import StateValidationError

NORM_TOLERANCE = 1e-12


class GroundStateSolution(BaseModel):
    """Lowest eigenpair plus a description of the basis it lives in.

    ``coefficients[i, k]`` is the amplitude of pseudospin index
    ``i = n + N/2`` (n ascending from -N/2) and bosonic index ``k``.
    LMG solutions have a single bosonic column.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    model: Literal["dicke", "lmg"]
    energy: float
    coefficients: np.ndarray
    converged: bool = True
    residual: float = 0.0
    n_tr: int | None = None
    parity: Literal[-1, 1] | None = None
    method: Literal["dense", "banded", "lanczos"] = "dense"

    @field_validator("coefficients")
    @classmethod
    def check_normalised(cls, value: np.ndarray) -> np.ndarray:
        value = np.atleast_2d(np.asarray(value, dtype=float))
        norm = float(np.linalg.norm(value))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise StateValidationError("ground-state coefficients are not normalised", norm=norm)
        return value

    @property
    def n_atoms(self) -> int:
        return int(self.coefficients.shape[0] - 1)

    @property
    def dimension(self) -> int:
        return int(self.coefficients.size)
