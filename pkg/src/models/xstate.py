"""Two-qubit X-state records and the correlation result."""

import math
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationInfo, model_validator

from ..errors import StateValidationError

DEFAULT_VALIDATION_TOL = 1e-12

# Basis order {|↑↑>, |↑↓>, |↓↑>, |↓↓>}; v_plus is the all-up population.
BASIS_LABELS = ("up,up", "up,down", "down,up", "down,down")


def _tolerance(info: ValidationInfo, default: float) -> float:
    if info.context and "tol" in info.context:
        return float(info.context["tol"])
    return default


class XState(BaseModel):
    """Pairwise reduced density matrix in X form.

    Pass ``context={"tol": ...}`` to ``model_validate`` to change the
    validation slack.
    """

    model_config = ConfigDict(frozen=True)

    v_plus: float
    v_minus: float
    w: float
    y: float
    u: complex = 0j

    @model_validator(mode="after")
    def check_physical(self, info: ValidationInfo) -> Self:
        tol = _tolerance(info, DEFAULT_VALIDATION_TOL)
        trace = self.v_plus + self.v_minus + 2 * self.w
        if abs(trace - 1.0) > tol:
            raise StateValidationError("trace is not one", trace=trace)
        for name in ("v_plus", "v_minus", "w"):
            value = getattr(self, name)
            if value < -tol or value > 1.0 + tol:
                raise StateValidationError(f"{name} outside [0, 1]", value=value)
        if self.w + tol < abs(self.y):
            raise StateValidationError("w < |y|", w=self.w, y=self.y)
        if self.v_plus * self.v_minus + tol < abs(self.u) ** 2:
            raise StateValidationError(
                "v+ v- < |u|^2", v_plus=self.v_plus, v_minus=self.v_minus, u=self.u
            )
        return self

    def to_matrix(self) -> np.ndarray:
        """Dense 4x4 matrix in the basis of ``BASIS_LABELS``."""
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = self.v_plus
        rho[1, 1] = rho[2, 2] = self.w
        rho[1, 2] = rho[2, 1] = self.y
        rho[3, 3] = self.v_minus
        rho[3, 0] = self.u
        rho[0, 3] = np.conj(self.u)
        return rho

    @classmethod
    def from_matrix(cls, rho: np.ndarray, tol: float = DEFAULT_VALIDATION_TOL) -> "XState":
        """Read an X-form 4x4 matrix back; anything outside the X pattern must vanish."""
        rho = np.asarray(rho, dtype=complex)
        mask = np.ones((4, 4), dtype=bool)
        for i, j in [(0, 0), (1, 1), (2, 2), (3, 3), (1, 2), (2, 1), (0, 3), (3, 0)]:
            mask[i, j] = False
        if np.max(np.abs(rho[mask])) > tol:
            raise StateValidationError("matrix is not in X form")
        if abs(rho[1, 1] - rho[2, 2]) > tol or abs(rho[1, 2].imag) > tol:
            raise StateValidationError("central block is not symmetric")
        return cls.model_validate(
            {
                "v_plus": rho[0, 0].real,
                "v_minus": rho[3, 3].real,
                "w": rho[1, 1].real,
                "y": rho[1, 2].real,
                "u": complex(rho[3, 0]),
            },
            context={"tol": tol},
        )


class MeasurementAngles(BaseModel):
    """Projector angles on qubit B, both in [0, pi/2]."""

    model_config = ConfigDict(frozen=True)

    theta: float
    phi: float

    @model_validator(mode="after")
    def check_range(self) -> Self:
        upper = math.pi / 2 + 1e-12
        for name in ("theta", "phi"):
            value = getattr(self, name)
            if not -1e-12 <= value <= upper:
                raise StateValidationError(f"{name} outside [0, pi/2]", value=value)
        return self


class CorrelationResult(BaseModel):
    """Discord, classical correlation and mutual information in nats."""

    model_config = ConfigDict(frozen=True)

    discord: float
    classical: float
    mutual_info: float
    optimal_angles: MeasurementAngles
    concurrence: float

    @model_validator(mode="after")
    def check_consistency(self) -> Self:
        if abs(self.discord + self.classical - self.mutual_info) > 1e-9:
            raise StateValidationError(
                "D + C != I",
                discord=self.discord,
                classical=self.classical,
                mutual_info=self.mutual_info,
            )
        for name in ("discord", "classical", "mutual_info"):
            if getattr(self, name) < -1e-10:
                raise StateValidationError(f"{name} is negative", value=getattr(self, name))
        return self
