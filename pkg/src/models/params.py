"""Model parameters for the finite-size solvers.

The Dicke coupling and the LMG field are both called lambda in the
literature; they live in separate records on purpose.
"""

import math

from pydantic import BaseModel, ConfigDict, Field


class DickeParams(BaseModel):
    """H = omega a^dag a + delta Jz + (2 lambda / sqrt(N)) (a^dag + a) Jx."""

    model_config = ConfigDict(frozen=True)

    n_atoms: int = Field(ge=1)
    omega: float = Field(default=1.0, gt=0)
    delta: float = Field(default=1.0, gt=0)
    coupling: float = Field(ge=0)
    n_tr: int = Field(default=8, ge=1)

    @property
    def lambda_c(self) -> float:
        return math.sqrt(self.omega * self.delta) / 2

    @property
    def j(self) -> float:
        return self.n_atoms / 2

    def displacement(self, n: float) -> float:
        """Coherent-state shift g_n of pseudospin sector n."""
        return 2 * self.coupling * n / (self.omega * math.sqrt(self.n_atoms))


class LmgParams(BaseModel):
    """H = -lambda Jz - (1/N) [Jx^2 + gamma Jy^2 - N (1 + gamma) / 4]."""

    model_config = ConfigDict(frozen=True)

    n_atoms: int = Field(ge=2)
    field: float = Field(ge=0)
    gamma: float = Field(default=0.0, ge=0, lt=1)

    @property
    def lambda_c(self) -> float:
        # Interaction prefactor fixed to one.
        return 1.0

    @property
    def j(self) -> float:
        return self.n_atoms / 2
