"""Thermodynamic-limit correlations from the mean-field ground state.

Both models reduce to a single order parameter beta^2 in [0, 1/2]; the
pairwise state is then fixed in closed form and the optimal measurement
is theta = pi/4, phi = 0, which gives the scalar

    M = sqrt((2 beta^2 - 1)^2 + 16 beta^4 (1 - beta^2)^2).
"""

import math
from typing import Literal

import numpy as np
import structlog
from scipy.optimize import minimize_scalar
from scipy.special import entr

from ..errors import ExtremumError
from ..models import CorrelationResult, MeanField, MeasurementAngles, XState
from .xstate import concurrence_wootters

logger = structlog.get_logger()

LN2 = math.log(2.0)
THERMO_ANGLES = MeasurementAngles(theta=math.pi / 4, phi=0.0)


def _h(*values: float) -> float:
    return float(np.sum(entr(np.clip(np.asarray(values, dtype=float), 0.0, None))))


def dicke_energy_per_atom(
    alpha: float, beta: float, omega: float, delta: float, coupling: float
) -> float:
    """Mean-field E_G / N of the Dicke model at a trial (alpha, beta)."""
    root = math.sqrt(max(0.0, 1.0 - beta * beta))
    return omega * alpha**2 - 4 * coupling * alpha * beta * root + delta * (beta * beta - 0.5)


def lmg_energy_per_atom(alpha_sq: float, coupling: float) -> float:
    """Mean-field E_G / N of the LMG model at a trial alpha^2."""
    return -((1 - alpha_sq) * alpha_sq + coupling * (alpha_sq - 0.5))


def mean_field_dicke(omega: float, delta: float, coupling: float) -> MeanField:
    """Minimise the Dicke mean-field energy."""
    lambda_c = math.sqrt(omega * delta) / 2
    beta_sq = 0.0 if coupling <= lambda_c else 0.5 * (1 - lambda_c**2 / coupling**2)
    beta = math.sqrt(beta_sq)
    alpha = (2 * coupling / omega) * beta * math.sqrt(1 - beta_sq)
    return MeanField(
        model="dicke",
        beta_sq=beta_sq,
        alpha=alpha,
        coupling=coupling,
        energy_per_atom=dicke_energy_per_atom(alpha, beta, omega, delta, coupling),
    )


def mean_field_lmg(coupling: float) -> MeanField:
    """Minimise the LMG mean-field energy; beta^2 = 1 - alpha^2."""
    beta_sq = max(0.0, (1 - coupling) / 2)
    alpha_sq = 1 - beta_sq
    return MeanField(
        model="lmg",
        beta_sq=beta_sq,
        alpha=math.sqrt(alpha_sq),
        coupling=coupling,
        energy_per_atom=lmg_energy_per_atom(alpha_sq, coupling),
    )


def mean_field(
    model: Literal["dicke", "lmg"], coupling: float, omega: float = 1.0, delta: float = 1.0
) -> MeanField:
    if model == "dicke":
        return mean_field_dicke(omega, delta, coupling)
    return mean_field_lmg(coupling)


def stationarity_residuals(mf: MeanField, omega: float, delta: float) -> tuple[float, float]:
    """Gradient conditions of the Dicke energy at the returned (alpha, beta)."""
    beta = math.sqrt(mf.beta_sq)
    root = math.sqrt(1 - mf.beta_sq)
    lam = mf.coupling
    first = omega * mf.alpha - 2 * lam * beta * root
    second = 2 * mf.alpha * lam * root - 2 * mf.alpha * lam * mf.beta_sq / root - beta * delta
    return first, second


def thermo_elements(mf: MeanField) -> XState:
    """Closed-form pairwise X state; LMG swaps the v+/v- populations."""
    b = mf.beta_sq
    coherence = b * (1 - b)
    low, high = b * b, (1 - b) ** 2
    v_plus, v_minus = (low, high) if mf.model == "dicke" else (high, low)
    return XState(v_plus=v_plus, v_minus=v_minus, w=coherence, y=coherence, u=coherence)


def thermo_m(beta_sq: float) -> float:
    b = beta_sq
    return math.sqrt((2 * b - 1) ** 2 + 16 * b * b * (1 - b) ** 2)


def _marginal_entropy(b: float) -> float:
    return _h(b, 1 - b)


def _joint_entropy(b: float) -> float:
    return _h(b * b + (1 - b) ** 2, 2 * b * (1 - b))


def _conditional_entropy(b: float) -> float:
    m = min(thermo_m(b), 1.0)
    return LN2 + 0.5 * _h(1 + m, 1 - m)


def thermo_discord(mf: MeanField) -> float:
    b = mf.beta_sq
    value = _marginal_entropy(b) - _joint_entropy(b) + _conditional_entropy(b)
    return max(0.0, value)


def thermo_classical(mf: MeanField) -> float:
    b = mf.beta_sq
    return max(0.0, _marginal_entropy(b) - _conditional_entropy(b))


def thermo_mutual_info(mf: MeanField) -> float:
    b = mf.beta_sq
    return 2 * _marginal_entropy(b) - _joint_entropy(b)


def thermo_correlations(mf: MeanField) -> CorrelationResult:
    """All closed-form measures bundled like the numeric route returns them."""
    return CorrelationResult(
        discord=thermo_discord(mf),
        classical=thermo_classical(mf),
        mutual_info=thermo_mutual_info(mf),
        optimal_angles=THERMO_ANGLES,
        concurrence=concurrence_wootters(thermo_elements(mf)),
    )


def locate_thermo_maximum(
    model: Literal["dicke", "lmg"],
    omega: float = 1.0,
    delta: float = 1.0,
    tol: float = 1e-6,
    grid_points: int = 400,
) -> tuple[float, float]:
    """Coupling and value of the closed-form discord maximum.

    Dicke is searched above lambda_c (up to 10 lambda_c), LMG below it.
    """
    if model == "dicke":
        lambda_c = math.sqrt(omega * delta) / 2
        lo, hi = lambda_c, 10 * lambda_c
    else:
        lambda_c = 1.0
        lo, hi = 0.0, lambda_c

    def objective(coupling: float) -> float:
        return -thermo_discord(mean_field(model, coupling, omega, delta))

    grid = np.linspace(lo, hi, grid_points)
    values = np.array([objective(float(c)) for c in grid])
    best = int(np.argmin(values))
    if best == 0 or best == grid_points - 1:
        raise ExtremumError("discord maximum not bracketed", model=model, lo=lo, hi=hi)

    found = minimize_scalar(
        objective,
        bracket=(grid[best - 1], grid[best], grid[best + 1]),
        method="golden",
        tol=tol / max(abs(grid[best]), 1.0),
    )
    lambda_star = float(found.x)
    value = -float(found.fun)
    logger.debug(
        "thermo_maximum_located",
        model=model,
        lambda_star=lambda_star,
        ratio=lambda_star / lambda_c,
        discord=value,
    )
    return lambda_star, value
