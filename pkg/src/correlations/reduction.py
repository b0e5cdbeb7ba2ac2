"""Pairwise reduced density matrix of a symmetric N-spin state.

Matrices use the basis {|↑↑>, |↑↓>, |↓↑>, |↓↓>}. With that order the
all-up population is v+ and the lower-left corner is

    u = <↓↓|rho|↑↑> = <J+^2> / (N (N - 1)),

which is what the brute-force partial trace gives.
"""

from collections.abc import Callable
from typing import Literal

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, ValidationError
from scipy import sparse

from ..errors import NonXFormError, NumericalError
from ..models import CollectiveExpectations, XState
from .xstate import concurrence_wootters

logger = structlog.get_logger()

UConvention = Literal["j_plus", "j_minus"]


class PairwiseElements(BaseModel):
    """All entries of the symmetric two-spin matrix, before the X-form cut."""

    model_config = ConfigDict(frozen=True)

    v_plus: float
    v_minus: float
    w: float
    y: float
    u: complex
    x_plus: complex
    x_minus: complex

    def to_matrix(self) -> np.ndarray:
        """Full 4x4 matrix including the x± entries."""
        rho = np.array(
            [
                [self.v_plus, np.conj(self.x_plus), np.conj(self.x_plus), np.conj(self.u)],
                [self.x_plus, self.w, self.y, self.x_minus],
                [self.x_plus, self.y, self.w, self.x_minus],
                [self.u, np.conj(self.x_minus), np.conj(self.x_minus), self.v_minus],
            ],
            dtype=complex,
        )
        return rho


def pairwise_elements(
    exp: CollectiveExpectations, u_convention: UConvention = "j_plus"
) -> PairwiseElements:
    """Evaluate every pairwise matrix element from collective expectations."""
    n = exp.n_atoms
    pairs = n * (n - 1)
    jm = np.conj(exp.jp)
    anticomm_minus = np.conj(exp.anticomm)
    u = exp.jp2 if u_convention == "j_plus" else np.conj(exp.jp2)
    return PairwiseElements(
        v_plus=(n * n - 2 * n + 4 * exp.jz2 + 4 * (n - 1) * exp.jz) / (4 * pairs),
        v_minus=(n * n - 2 * n + 4 * exp.jz2 - 4 * (n - 1) * exp.jz) / (4 * pairs),
        w=(n * n - 4 * exp.jz2) / (4 * pairs),
        y=(exp.jxy2 - n / 2) / pairs,
        u=complex(u / pairs),
        x_plus=complex(((n - 1) * exp.jp + exp.anticomm) / (2 * pairs)),
        x_minus=complex(((n - 1) * jm - anticomm_minus) / (2 * pairs)),
    )


def reduce_pairwise(
    exp: CollectiveExpectations,
    parity_tol: float = 1e-8,
    validation_tol: float = 1e-12,
    u_convention: UConvention = "j_plus",
) -> tuple[XState, complex, complex]:
    """X-form pairwise state plus the discarded x± diagnostics."""
    elements = pairwise_elements(exp, u_convention)
    if abs(elements.x_plus) >= parity_tol or abs(elements.x_minus) >= parity_tol:
        raise NonXFormError(
            "state is not parity symmetric",
            x_plus=elements.x_plus,
            x_minus=elements.x_minus,
        )
    if abs(elements.w - elements.y) > max(1e-10, validation_tol):
        logger.warning("w_differs_from_y", w=elements.w, y=elements.y)
    try:
        rho = XState.model_validate(
            {
                "v_plus": elements.v_plus,
                "v_minus": elements.v_minus,
                "w": elements.w,
                "y": elements.y,
                "u": elements.u,
            },
            context={"tol": validation_tol},
        )
    except ValidationError as exc:
        raise NumericalError("pairwise state is unphysical", cause=str(exc)) from exc
    return rho, elements.x_plus, elements.x_minus


def scaled_concurrence(exp: CollectiveExpectations) -> float:
    """C_N = 1 - 4 <Jy^2> / N."""
    return 1.0 - 4.0 * exp.jy2 / exp.n_atoms


def wootters_scaled_concurrence(rho: XState, n_atoms: int) -> float:
    """(N - 1) times the pairwise Wootters concurrence."""
    return (n_atoms - 1) * concurrence_wootters(rho)


def collective_expectations(
    n_atoms: int,
    jz: sparse.spmatrix,
    jp: sparse.spmatrix,
    expect: Callable[[sparse.spmatrix], complex],
) -> CollectiveExpectations:
    """Assemble the reduction inputs from an expectation-value callback.

    ``jz`` and ``jp`` are the collective operators in whatever frame the
    callback evaluates; the callback returns <O> for a sparse operator O.
    """
    j = n_atoms / 2
    jz2_op = jz @ jz
    jp2_op = jp @ jp
    anticomm_op = jp @ jz + jz @ jp

    jz_value = float(np.real(expect(jz)))
    jz2_value = float(np.real(expect(jz2_op)))
    jp_value = complex(expect(jp))
    jp2_value = complex(expect(jp2_op))
    anticomm_value = complex(expect(anticomm_op))

    jxy2 = j * (j + 1) - jz2_value
    # Jx^2 - Jy^2 = (J+^2 + J-^2) / 2
    jy2 = 0.5 * (jxy2 - jp2_value.real)
    return CollectiveExpectations(
        n_atoms=n_atoms,
        jz=jz_value,
        jz2=jz2_value,
        jp=jp_value,
        jp2=jp2_value,
        jxy2=jxy2,
        jy2=jy2,
        anticomm=anticomm_value,
    )
