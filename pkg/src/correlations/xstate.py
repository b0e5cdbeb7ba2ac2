"""Correlation measures of two-qubit X states.

All entropies are in nats. Qubit B is measured with the rank-one projectors

    |psi_1> = cos(theta) |0> + e^{i phi} sin(theta) |1>
    |psi_2> = e^{-i phi} sin(theta) |0> - cos(theta) |1>

where |0> is the state carrying the v_plus population.
"""

import math

import numpy as np
import structlog
from scipy.optimize import minimize, minimize_scalar
from scipy.special import entr

from ..errors import ConvergenceError
from ..models import CorrelationResult, MeasurementAngles, XState

logger = structlog.get_logger()

HALF_PI = math.pi / 2
GRID_POINTS = 64
STARTS = 3
LOCAL_POINTS = 9
CHECK_TOLERANCE = 1e-8


def _clip_probability(values: np.ndarray | float) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return np.clip(values, 0.0, 1.0)


def _entropy(probabilities: np.ndarray | list[float]) -> float:
    return float(np.sum(entr(_clip_probability(np.asarray(probabilities)))))


def entropy_subsystem(rho: XState) -> float:
    """Von Neumann entropy of either single-qubit marginal."""
    return _entropy([rho.v_plus + rho.w, rho.v_minus + rho.w])


def joint_eigenvalues(rho: XState) -> np.ndarray:
    """The four eigenvalues {w+y, w-y, lambda+, lambda-} of the X state."""
    mean = 0.5 * (rho.v_plus + rho.v_minus)
    radius = 0.5 * math.sqrt((rho.v_plus - rho.v_minus) ** 2 + 4 * abs(rho.u) ** 2)
    return np.array([rho.w + rho.y, rho.w - rho.y, mean + radius, mean - radius])


def entropy_joint(rho: XState) -> float:
    """Von Neumann entropy of the two-qubit state."""
    return _entropy(joint_eigenvalues(rho))


def _conditional_entropy_grid(
    rho: XState, theta: np.ndarray | float, phi: np.ndarray | float
) -> np.ndarray:
    """Vectorised H(A | {Pi^B}) over broadcastable angle arrays."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    cos2 = np.cos(theta) ** 2
    sin2 = np.sin(theta) ** 2
    sincos = np.sin(theta) * np.cos(theta)
    coherence = np.abs(np.exp(1j * phi) * np.conj(rho.u) + np.exp(-1j * phi) * rho.y)

    branches = (
        (rho.v_plus * cos2 + rho.w * sin2, rho.w * cos2 + rho.v_minus * sin2),
        (rho.v_plus * sin2 + rho.w * cos2, rho.w * sin2 + rho.v_minus * cos2),
    )
    total = np.zeros(np.broadcast(theta, phi).shape)
    y_abs = sincos * coherence
    for x_plus, x_minus in branches:
        prob = x_plus + x_minus
        radius = np.sqrt((x_plus - x_minus) ** 2 + 4 * y_abs**2)
        # p_a * S(rho_A|a) written with unnormalised eigenvalues so p_a = 0 drops out.
        mu_plus = _clip_probability(0.5 * (prob + radius))
        mu_minus = _clip_probability(0.5 * (prob - radius))
        total = total + entr(mu_plus) + entr(mu_minus) - entr(_clip_probability(prob))
    return total


def conditional_entropy(rho: XState, angles: MeasurementAngles) -> float:
    """Measurement-conditioned entropy H(A | {Pi_k^B})(theta, phi)."""
    return float(_conditional_entropy_grid(rho, angles.theta, angles.phi))


def _refine(
    rho: XState, theta: float, phi: float, step: float, tol: float
) -> tuple[float, float, float]:
    """Coordinate-wise bounded line searches inside one grid cell around (theta, phi)."""
    value = float(_conditional_entropy_grid(rho, theta, phi))
    for _ in range(50):
        previous = value
        lo, hi = max(0.0, theta - step), min(HALF_PI, theta + step)
        found = minimize_scalar(
            lambda t: float(_conditional_entropy_grid(rho, t, phi)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-10},
        )
        if found.fun < value:
            theta, value = float(found.x), float(found.fun)
        lo, hi = max(0.0, phi - step), min(HALF_PI, phi + step)
        found = minimize_scalar(
            lambda f: float(_conditional_entropy_grid(rho, theta, f)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-10},
        )
        if found.fun < value:
            phi, value = float(found.x), float(found.fun)
        for edge in (0.0, HALF_PI):
            edge_value = float(_conditional_entropy_grid(rho, theta, edge))
            if edge_value < value:
                phi, value = edge, edge_value
            edge_value = float(_conditional_entropy_grid(rho, edge, phi))
            if edge_value < value:
                theta, value = edge, edge_value
        if previous - value < tol:
            break

    # Coordinate passes crawl along diagonal valleys; finish with a joint step.
    polished = minimize(
        lambda x: float(_conditional_entropy_grid(rho, x[0], x[1])),
        np.array([theta, phi]),
        method="L-BFGS-B",
        bounds=[(0.0, HALF_PI), (0.0, HALF_PI)],
        options={"ftol": 1e-15, "gtol": 1e-12},
    )
    if polished.fun < value:
        theta, phi, value = float(polished.x[0]), float(polished.x[1]), float(polished.fun)
    return theta, phi, value


def _grid_starts(grid: np.ndarray, limit: int = STARTS) -> list[tuple[int, int]]:
    """Local minima of the coarse grid (edges included), best first."""
    padded = np.pad(grid, 1, constant_values=np.inf)
    rows, cols = grid.shape
    is_min = np.ones(grid.shape, dtype=bool)
    for di in (0, 1, 2):
        for dj in (0, 1, 2):
            if di == dj == 1:
                continue
            is_min &= grid <= padded[di : di + rows, dj : dj + cols]
    candidates = np.argwhere(is_min)
    order = np.argsort(grid[is_min], kind="stable")
    return [(int(i), int(j)) for i, j in candidates[order][:limit]]


def _local_grid_minimum(
    rho: XState, theta: float, phi: float, step: float
) -> tuple[float, float, float]:
    """Fine grid of one coarse cell either side of (theta, phi)."""
    offsets = np.linspace(-step, step, LOCAL_POINTS)
    thetas = np.clip(theta + offsets, 0.0, HALF_PI)
    phis = np.clip(phi + offsets, 0.0, HALF_PI)
    local = _conditional_entropy_grid(rho, thetas[:, None], phis[None, :])
    k, m = np.unravel_index(int(np.argmin(local)), local.shape)
    return float(thetas[k]), float(phis[m]), float(local[k, m])


def minimize_conditional_entropy(
    rho: XState, grid_points: int = GRID_POINTS, tol: float = 1e-10
) -> tuple[MeasurementAngles, float]:
    """Coarse uniform grid over [0, pi/2]^2 followed by local refinement.

    Refinement starts from the best few local minima of the grid. The result
    is then compared against a finer grid around it and rejected if that
    grid finds a lower value.
    """
    axis = np.linspace(0.0, HALF_PI, grid_points)
    grid = _conditional_entropy_grid(rho, axis[:, None], axis[None, :])
    step = float(axis[1] - axis[0])

    theta, phi, value = math.nan, math.nan, math.inf
    for i, j in _grid_starts(grid):
        candidate = _refine(rho, float(axis[i]), float(axis[j]), step, tol)
        if candidate[2] < value:
            theta, phi, value = candidate

    check_theta, check_phi, check_value = _local_grid_minimum(rho, theta, phi, step)
    if check_value < value - CHECK_TOLERANCE:
        raise ConvergenceError(
            "refinement disagrees with local grid minimum",
            refined=value,
            local_min=check_value,
            theta=theta,
            phi=phi,
            local_theta=check_theta,
            local_phi=check_phi,
        )
    return MeasurementAngles(theta=theta, phi=phi), value


def concurrence_wootters(rho: XState) -> float:
    """Wootters concurrence of an X state."""
    return 2 * max(
        0.0,
        abs(rho.u) - rho.w,
        abs(rho.y) - math.sqrt(max(rho.v_plus * rho.v_minus, 0.0)),
    )


def quantum_discord(rho: XState, tol: float = 1e-10) -> CorrelationResult:
    """Discord, classical correlation and mutual information of an X state."""
    h_a = entropy_subsystem(rho)
    h_b = h_a  # both marginals are diag(v+ + w, v- + w)
    h_ab = entropy_joint(rho)
    mutual_info = h_a + h_b - h_ab

    angles, h_conditional = minimize_conditional_entropy(rho, tol=tol)
    discord = h_b - h_ab + h_conditional
    classical = mutual_info - discord
    logger.debug(
        "discord_minimised",
        discord=discord,
        theta=angles.theta,
        phi=angles.phi,
    )
    return CorrelationResult(
        discord=discord,
        classical=classical,
        mutual_info=mutual_info,
        optimal_angles=angles,
        concurrence=concurrence_wootters(rho),
    )
