"""Thermodynamic-limit order parameters."""

from typing import Literal, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import StateValidationError


class MeanField(BaseModel):
    """Mean-field solution of either model.

    For the LMG model ``beta_sq`` is the reparametrised 1 - alpha^2, so both
    models share the same pairwise elements up to a v+/v- swap.
    """

    model_config = ConfigDict(frozen=True)

    model: Literal["dicke", "lmg"]
    beta_sq: float = Field(ge=0.0, le=0.5 + 1e-15)
    alpha: float
    coupling: float
    energy_per_atom: float

    @model_validator(mode="after")
    def check_alpha(self) -> Self:
        if self.model == "lmg" and abs(self.alpha**2 - (1 - self.beta_sq)) > 1e-12:
            raise StateValidationError(
                "LMG alpha^2 must equal 1 - beta^2", alpha=self.alpha, beta_sq=self.beta_sq
            )
        return self

    @property
    def in_ordered_phase(self) -> bool:
        return self.beta_sq > 0
