"""Derivatives, extremum location and finite-size scaling fits."""

from collections.abc import Callable, Sequence
from typing import Literal

import numpy as np
import structlog
from scipy.optimize import minimize_scalar
from scipy.stats import linregress

from ..errors import ExtremumError, FitError
from ..models import CorrelationCurve, ScalingFit

logger = structlog.get_logger()

Quantity = Literal["discord", "classical", "concurrence_scaled"]
Side = Literal["max", "min"]


def curve_values(curve: CorrelationCurve, quantity: Quantity = "discord") -> np.ndarray:
    values = getattr(curve, quantity)
    if values is None:
        raise FitError(f"curve has no {quantity} values", model=curve.model, n_atoms=curve.n_atoms)
    return np.asarray(values, dtype=float)


def derivative(
    curve: CorrelationCurve,
    quantity: Quantity = "discord",
    tolerance: float | None = None,
) -> np.ndarray:
    """d(quantity)/d(lambda): central differences inside, one-sided at the ends.

    With a ``tolerance`` the truncation error h^2 |f'''| / 6 is estimated
    from the data and a warning is logged when it exceeds the tolerance.
    """
    grid = np.asarray(curve.lambda_grid, dtype=float)
    values = curve_values(curve, quantity)
    slope = np.gradient(values, grid)

    if tolerance is not None and grid.size >= 4:
        third = np.gradient(np.gradient(slope, grid), grid)
        spacing = np.gradient(grid)
        truncation = float(np.max(spacing**2 * np.abs(third) / 6))
        if truncation > tolerance:
            logger.warning(
                "derivative_grid_coarse",
                model=curve.model,
                n_atoms=curve.n_atoms,
                quantity=quantity,
                truncation=truncation,
                tolerance=tolerance,
            )
    return slope


def _parabola_vertex(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Vertex of the parabola through three (possibly unevenly spaced) points."""
    coeffs = np.polyfit(x, y, 2)
    if coeffs[0] == 0:
        return float(x[1]), float(y[1])
    x_star = -coeffs[1] / (2 * coeffs[0])
    x_star = float(np.clip(x_star, x[0], x[2]))
    return x_star, float(np.polyval(coeffs, x_star))


def locate_extremum(
    target: CorrelationCurve | tuple[Sequence[float], Sequence[float]] | Callable[[float], float],
    side: Side = "max",
    *,
    quantity: Quantity = "discord",
    bracket: tuple[float, float] | None = None,
    tol: float = 1e-5,
    grid_points: int = 41,
) -> tuple[float, float]:
    """Interior extremum of sampled data or of a callable.

    Sampled data is refined with the parabola through the best point and
    its neighbours; a callable is scanned over ``bracket`` and then refined
    by golden-section search to ``tol`` in lambda.
    """
    sign = -1.0 if side == "max" else 1.0

    if callable(target):
        if bracket is None:
            raise ExtremumError("a callable needs a search bracket")
        lo, hi = bracket
        grid = np.linspace(lo, hi, grid_points)
        samples = np.array([sign * target(float(x)) for x in grid])
        best = int(np.argmin(samples))
        if best in (0, grid.size - 1):
            raise ExtremumError("extremum not bracketed", side=side, lo=lo, hi=hi)
        found = minimize_scalar(
            lambda x: sign * target(float(x)),
            bracket=(grid[best - 1], grid[best], grid[best + 1]),
            method="golden",
            tol=tol / max(abs(grid[best]), 1.0),
        )
        return float(found.x), sign * float(found.fun)

    if isinstance(target, CorrelationCurve):
        x = np.asarray(target.lambda_grid, dtype=float)
        y = curve_values(target, quantity)
    else:
        x = np.asarray(target[0], dtype=float)
        y = np.asarray(target[1], dtype=float)
    if bracket is not None:
        mask = (x >= bracket[0]) & (x <= bracket[1])
        x, y = x[mask], y[mask]
    if x.size < 3:
        raise ExtremumError("need at least three samples", size=int(x.size))

    best = int(np.argmin(sign * y))
    if best in (0, x.size - 1):
        raise ExtremumError(
            "extremum at the edge of the sampled range",
            side=side,
            lambda_edge=float(x[best]),
        )
    window = slice(best - 1, best + 2)
    return _parabola_vertex(x[window], y[window])


def _prepare(
    points: Sequence[tuple[int, float]], min_n: int | None
) -> tuple[np.ndarray, np.ndarray]:
    selected = [(n, v) for n, v in points if min_n is None or n >= min_n]
    if len(selected) < 3:
        raise FitError("scaling fits need at least three sizes", available=len(selected))
    n_values = np.array([n for n, _ in selected], dtype=float)
    values = np.array([v for _, v in selected], dtype=float)
    if np.unique(n_values).size < 2:
        raise FitError("scaling fits need distinct sizes")
    if not np.all(np.isfinite(values)):
        raise FitError("scaling fit values must be finite")
    return n_values, values


def _fit(
    kind: Literal["power_law", "log2_linear"], x: np.ndarray, y: np.ndarray, n: np.ndarray
) -> ScalingFit:
    result = linregress(x, y)
    predicted = result.intercept + result.slope * x
    r_squared = float(np.clip(result.rvalue**2, 0.0, 1.0))
    coefficient = float(np.exp(result.intercept)) if kind == "power_law" else float(result.slope)
    fit = ScalingFit(
        kind=kind,
        coefficient=coefficient,
        exponent_or_slope=float(result.slope),
        intercept=float(result.intercept),
        r_squared=r_squared,
        n_values=[int(v) for v in n],
        residuals=[float(r) for r in y - predicted],
    )
    logger.info(
        "scaling_fit",
        kind=kind,
        slope=fit.exponent_or_slope,
        intercept=fit.intercept,
        r_squared=r_squared,
        sizes=len(fit.n_values),
    )
    return fit


def fit_power_law(points: Sequence[tuple[int, float]], min_n: int | None = None) -> ScalingFit:
    """value = coefficient * N ** exponent, fitted on (ln N, ln value)."""
    n_values, values = _prepare(points, min_n)
    if np.any(values <= 0):
        raise FitError("power-law fit needs positive values", minimum=float(values.min()))
    return _fit("power_law", np.log(n_values), np.log(values), n_values)


def fit_log2_linear(points: Sequence[tuple[int, float]], min_n: int | None = None) -> ScalingFit:
    """value = slope * log2(N) + intercept."""
    n_values, values = _prepare(points, min_n)
    return _fit("log2_linear", np.log2(n_values), values, n_values)
