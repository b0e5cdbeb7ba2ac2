"""Collective spin expectation values of a symmetric N-spin state."""

from typing import Self

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, model_validator

from ..errors import StateValidationError


class CollectiveExpectations(BaseModel):
    """Inputs of the pairwise reduction.

    All values refer to the symmetric sector j = N/2.
    """

    model_config = ConfigDict(frozen=True)

    n_atoms: int = Field(ge=2)
    jz: float
    jz2: float
    jp: complex = 0j
    jp2: complex = 0j
    jxy2: float
    jy2: float
    anticomm: complex = 0j  # <[J+, Jz]_+>

    @property
    def j(self) -> float:
        return self.n_atoms / 2

    @property
    def casimir(self) -> float:
        return self.j * (self.j + 1)

    @model_validator(mode="after")
    def check_ranges(self, info: ValidationInfo) -> Self:
        tol = 1e-10
        if info.context and "tol" in info.context:
            tol = max(tol, float(info.context["tol"]))
        half = self.n_atoms / 2
        scale = max(1.0, half**2)
        if abs(self.jz) > half + tol * scale:
            raise StateValidationError("|<Jz>| > N/2", jz=self.jz)
        if self.jz2 < -tol * scale or self.jz2 > half**2 + tol * scale:
            raise StateValidationError("<Jz^2> outside [0, N^2/4]", jz2=self.jz2)
        if abs(self.jxy2 - (self.casimir - self.jz2)) > tol * max(1.0, self.casimir):
            raise StateValidationError(
                "<Jx^2 + Jy^2> inconsistent with j(j+1) - <Jz^2>",
                jxy2=self.jxy2,
                jz2=self.jz2,
            )
        if self.jy2 < -tol * max(1.0, self.casimir):
            raise StateValidationError("<Jy^2> is negative", jy2=self.jy2)
        return self
