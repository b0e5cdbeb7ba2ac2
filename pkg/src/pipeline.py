"""Sweep and scaling orchestration shared by the CLI commands."""

import asyncio
from collections import defaultdict
from collections.abc import Callable
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from pathlib import Path
from typing import Literal

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, ValidationError

from .analysis import derivative, fit_log2_linear, fit_power_law, locate_extremum
from .correlations import (
    mean_field,
    quantum_discord,
    reduce_pairwise,
    scaled_concurrence,
    thermo_correlations,
    wootters_scaled_concurrence,
)
from .errors import DiscordError, ExtremumError, StateValidationError
from .models import (
    CorrelationCurve,
    CorrelationPoint,
    DickeParams,
    GroundStateSolution,
    LmgParams,
    ScalingReport,
    SizeSummary,
    SweepConfig,
    Tolerances,
    uniform_steps,
)
from .solvers import DickeSolver, LmgSolver
from .storage import ResultStore, plot_points
from .utils import setup_logging, worker_logging_args

logger = structlog.get_logger()

Evaluator = Callable[[int | None, float], CorrelationPoint]

# Derivative-extremum search windows, in units of lambda_c.
DEFAULT_EXTREMUM_WINDOWS = {"dicke": (0.9, 1.5), "lmg": (0.5, 1.1)}


def build_lambda_grid(cfg: SweepConfig) -> np.ndarray:
    """Uniform grid, optionally densified geometrically around lambda_c."""
    lo, hi = cfg.lambda_range[:2]
    scale = cfg.lambda_c if cfg.lambda_units == "critical" else 1.0
    grid = np.linspace(lo, hi, cfg.grid_steps) * scale

    if cfg.refine_near_critical:
        spacing = (grid[-1] - grid[0]) / (grid.size - 1)
        offsets = spacing * 0.5 ** np.arange(1, cfg.refine_levels + 1)
        extra = np.concatenate([[cfg.lambda_c], cfg.lambda_c - offsets, cfg.lambda_c + offsets])
        extra = extra[(extra >= grid[0]) & (extra <= grid[-1])]
        grid = np.concatenate([grid, extra])
    return np.unique(grid)


class PointEvaluator:
    """Evaluate one (N, lambda) point; picklable so it can run in worker processes.

    Numerical failures are captured on the returned point instead of raised.
    """

    def __init__(
        self,
        model: str,
        omega: float = 1.0,
        delta: float = 1.0,
        gamma: float = 0.0,
        n_tr: int | str = "auto",
        tolerances: Tolerances | None = None,
    ):
        self.model = model
        self.omega = omega
        self.delta = delta
        self.gamma = gamma
        self.n_tr = n_tr
        self.tolerances = tolerances or Tolerances()

    @classmethod
    def from_config(cls, cfg: SweepConfig) -> "PointEvaluator":
        return cls(
            model=cfg.model,
            omega=cfg.omega,
            delta=cfg.delta,
            gamma=cfg.gamma,
            n_tr=cfg.n_tr,
            tolerances=cfg.tolerances,
        )

    def __call__(self, n_atoms: int | None, coupling: float) -> CorrelationPoint:
        base = self._base_point(n_atoms, coupling)
        try:
            if self.model.startswith("thermo_"):
                return self._thermo(base)
            if self.model == "dicke":
                return self._dicke(base)
            return self._lmg(base)
        except (DiscordError, ValidationError) as exc:
            logger.warning(
                "point_failed",
                model=self.model,
                n_atoms=n_atoms,
                coupling=coupling,
                error=type(exc).__name__,
            )
            return base.model_copy(
                update={"converged": False, "failure": f"{type(exc).__name__}: {exc}"[:300]}
            )

    def _base_point(self, n_atoms: int | None, coupling: float) -> CorrelationPoint:
        dicke = self.model in ("dicke", "thermo_dicke")
        return CorrelationPoint(
            model=self.model,  # type: ignore[arg-type]
            n_atoms=n_atoms,
            coupling=float(coupling),
            gamma=None if dicke else self.gamma,
            omega=self.omega if dicke else None,
            delta=self.delta if dicke else None,
        )

    def _thermo(self, base: CorrelationPoint) -> CorrelationPoint:
        kind = "dicke" if self.model == "thermo_dicke" else "lmg"
        mf = mean_field(kind, base.coupling, self.omega, self.delta)
        result = thermo_correlations(mf)
        return base.model_copy(
            update={
                "n_atoms": None,
                "discord": result.discord,
                "classical": result.classical,
                "mutual_info": result.mutual_info,
                "energy": mf.energy_per_atom,
                "tolerance": self.tolerances.validation,
            }
        )

    def _correlate(
        self,
        base: CorrelationPoint,
        solver: DickeSolver | LmgSolver,
        solution: GroundStateSolution,
        params: DickeParams | LmgParams,
        tolerance: float,
    ) -> CorrelationPoint:
        tol = self.tolerances
        exp = solver.expectations(solution, params)
        rho, _, _ = reduce_pairwise(exp, parity_tol=tol.parity, validation_tol=tol.validation)
        result = quantum_discord(rho, tol=tol.optimizer)
        return base.model_copy(
            update={
                "discord": result.discord,
                "classical": result.classical,
                "mutual_info": result.mutual_info,
                "concurrence_scaled": scaled_concurrence(exp),
                "concurrence_wootters_scaled": wootters_scaled_concurrence(rho, exp.n_atoms),
                "energy": solution.energy,
                "converged": solution.converged,
                "n_tr_used": solution.n_tr,
                "tolerance": tolerance,
            }
        )

    def _dicke(self, base: CorrelationPoint) -> CorrelationPoint:
        solver = DickeSolver(self.tolerances)
        n_tr = self.tolerances.n_tr_start if self.n_tr == "auto" else int(self.n_tr)
        params = DickeParams(
            n_atoms=base.n_atoms,
            omega=self.omega,
            delta=self.delta,
            coupling=base.coupling,
            n_tr=n_tr,
        )
        if self.n_tr == "auto":

            def observe(solution: GroundStateSolution) -> float:
                exp = solver.expectations(solution, params)
                rho, _, _ = reduce_pairwise(
                    exp,
                    parity_tol=self.tolerances.parity,
                    validation_tol=self.tolerances.validation,
                )
                return quantum_discord(rho, tol=self.tolerances.optimizer).discord

            solution = solver.converge(params, observe)
            tolerance = self.tolerances.n_tr_convergence
        else:
            solution = solver.solve_ground_state(params)
            tolerance = self.tolerances.eigensolver
        return self._correlate(base, solver, solution, params, tolerance)

    def _lmg(self, base: CorrelationPoint) -> CorrelationPoint:
        solver = LmgSolver(self.tolerances)
        params = LmgParams(n_atoms=base.n_atoms, field=base.coupling, gamma=self.gamma)
        solution = solver.solve_ground_state(params)
        return self._correlate(base, solver, solution, params, self.tolerances.eigensolver)


async def evaluate_points(
    tasks: list[tuple[int | None, float]],
    evaluator: Evaluator,
    parallelism: int = 1,
) -> list[CorrelationPoint]:
    """Run every task on a bounded pool; output sorted by (N, lambda)."""
    loop = asyncio.get_running_loop()
    executor: Executor
    if parallelism > 1:
        logging_args = worker_logging_args()
        executor = ProcessPoolExecutor(
            max_workers=parallelism,
            initializer=setup_logging if logging_args else None,
            initargs=logging_args or (),
        )
    else:
        executor = ThreadPoolExecutor(max_workers=1)
    semaphore = asyncio.Semaphore(parallelism)

    async def run_one(n_atoms: int | None, coupling: float) -> CorrelationPoint:
        async with semaphore:
            return await loop.run_in_executor(executor, evaluator, n_atoms, coupling)

    with executor:
        points = await asyncio.gather(*(run_one(n, lam) for n, lam in tasks))
    return sorted(points, key=lambda p: p.sort_key)


def fill_derivatives(points: list[CorrelationPoint], tolerance: float | None = None) -> None:
    """Set dD/dlambda and dC/dlambda on every successful point, per (model, N) family."""
    families: dict[tuple[str, int | None], list[int]] = defaultdict(list)
    for index, point in enumerate(points):
        if point.failure is None and point.discord is not None and point.classical is not None:
            families[(point.model, point.n_atoms)].append(index)

    for indices in families.values():
        indices.sort(key=lambda i: points[i].coupling)
        if len(indices) < 2:
            continue
        curve = CorrelationCurve.from_points([points[i] for i in indices])
        d_discord = derivative(curve, "discord", tolerance=tolerance)
        d_classical = derivative(curve, "classical", tolerance=tolerance)
        for index, slope, classical_slope in zip(indices, d_discord, d_classical):
            points[index] = points[index].model_copy(
                update={
                    "d_discord_d_lambda": float(slope),
                    "d_classical_d_lambda": float(classical_slope),
                }
            )


def curves_from_points(points: list[CorrelationPoint]) -> list[CorrelationCurve]:
    families: dict[tuple[str, int | None], list[CorrelationPoint]] = defaultdict(list)
    for point in points:
        if point.failure is None and point.discord is not None:
            families[(point.model, point.n_atoms)].append(point)
    return [
        CorrelationCurve.from_points(family)
        for _, family in sorted(families.items(), key=lambda item: item[0][1] or 0)
        if len(family) >= 2
    ]


class SweepResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    points: list[CorrelationPoint]
    curves: list[CorrelationCurve]
    output_path: Path | None = None
    plots: list[Path] = []


async def run_sweep(
    cfg: SweepConfig,
    evaluator: Evaluator | None = None,
    store: ResultStore | None = None,
    persist: bool = True,
) -> SweepResult:
    """Evaluate every (N, lambda) point of the config and persist the rows."""
    grid = build_lambda_grid(cfg)
    sizes: list[int | None] = list(cfg.n_atoms) if cfg.is_finite_size else [None]
    tasks = [(n, float(lam)) for n in sizes for lam in grid]
    log = logger.bind(model=cfg.model)
    log.info("sweep_started", points=len(tasks), sizes=sizes, parallelism=cfg.parallelism)

    evaluator = evaluator or PointEvaluator.from_config(cfg)
    points = await evaluate_points(tasks, evaluator, cfg.parallelism)
    if cfg.compute_derivative:
        fill_derivatives(points, tolerance=cfg.tolerances.derivative)

    failed = sum(1 for p in points if p.failure)
    log.info("sweep_finished", points=len(points), failed=failed)

    result = SweepResult(points=points, curves=curves_from_points(points))
    if persist:
        store = store or ResultStore()
        result.output_path = store.write_points(points, cfg.output_path, cfg.format)
        if cfg.plot:
            result.plots = plot_points(points, result.output_path.parent)
    return result


def refine_extremum(
    evaluator: Evaluator,
    n_atoms: int,
    guess: float,
    side: Literal["max", "min"],
    step: float,
    tol: float = 1e-5,
) -> tuple[float, float]:
    """Bracketed search for the dD/dlambda extremum near a grid estimate.

    Every trial coupling is evaluated afresh at lambda +- step, so the
    result does not depend on where the sweep grid happened to fall.
    """

    def slope(coupling: float) -> float:
        ahead = evaluator(n_atoms, coupling + step)
        behind = evaluator(n_atoms, coupling - step)
        if ahead.discord is None or behind.discord is None:
            raise ExtremumError(
                "point failed during extremum refinement",
                n_atoms=n_atoms,
                coupling=coupling,
                failure=ahead.failure or behind.failure,
            )
        return (ahead.discord - behind.discord) / (2 * step)

    return locate_extremum(
        slope, side, bracket=(guess - 2 * step, guess + 2 * step), tol=tol, grid_points=5
    )


async def run_scaling(
    cfg: SweepConfig,
    evaluator: Evaluator | None = None,
    store: ResultStore | None = None,
    report_path: Path | None = None,
) -> ScalingReport:
    """D(lambda_c) power law and log2 growth of the dD/dlambda extremum over N."""
    if not cfg.is_finite_size:
        raise StateValidationError("scaling needs a finite-size model", model=cfg.model)
    if len(cfg.n_atoms) < 3:
        raise StateValidationError("scaling needs at least three sizes", sizes=cfg.n_atoms)

    model = cfg.base_model
    lambda_c = cfg.lambda_c
    side: Literal["max", "min"] = "max" if model == "dicke" else "min"
    window = cfg.extremum_window or DEFAULT_EXTREMUM_WINDOWS[model]
    step = cfg.tolerances.derivative_step * lambda_c
    window_grid: np.ndarray = np.array([])
    if cfg.locate_extrema:
        steps = uniform_steps(window[0], window[1], cfg.tolerances.derivative_step)
        window_grid = np.linspace(window[0], window[1], steps) * lambda_c
    # Exact grid values only; lambda_c may sit a rounding error away from a grid point.
    window_points = {float(lam) for lam in window_grid}

    evaluator = evaluator or PointEvaluator.from_config(cfg)
    tasks: list[tuple[int | None, float]] = []
    for n in cfg.n_atoms:
        tasks.append((n, lambda_c))
        tasks.extend((n, float(lam)) for lam in window_grid)
    logger.info(
        "scaling_started",
        model=model,
        sizes=cfg.n_atoms,
        window_points=len(window_grid),
        spacing=step,
    )
    points = await evaluate_points(tasks, evaluator, cfg.parallelism)

    by_size: dict[int, list[CorrelationPoint]] = defaultdict(list)
    for point in points:
        if point.n_atoms is not None:
            by_size[point.n_atoms].append(point)

    sizes: list[SizeSummary] = []
    for n in sorted(cfg.n_atoms):
        family = by_size[n]
        critical = next(p for p in family if p.coupling == lambda_c)
        if critical.discord is None:
            logger.warning("critical_point_failed", n_atoms=n, failure=critical.failure)
            continue
        summary = SizeSummary(n_atoms=n, discord_at_critical=critical.discord)

        unique = {
            p.coupling: p
            for p in family
            if p.discord is not None and p.coupling in window_points
        }
        if len(unique) >= 3:
            curve = CorrelationCurve.from_points(list(unique.values()))
            slopes = derivative(curve, "discord", tolerance=cfg.tolerances.derivative)
            try:
                guess, _ = locate_extremum((curve.lambda_grid, slopes), side)
                lambda_star, value = await asyncio.to_thread(
                    refine_extremum, evaluator, n, guess, side, step
                )
            except DiscordError as exc:
                logger.warning("extremum_not_found", n_atoms=n, error=str(exc))
            else:
                logger.debug(
                    "extremum_refined", n_atoms=n, grid_estimate=guess, lambda_star=lambda_star
                )
                summary = summary.model_copy(
                    update={"extremum_lambda": lambda_star, "extremum_value": value}
                )
        sizes.append(summary)

    power_law = fit_power_law(
        [(s.n_atoms, s.discord_at_critical) for s in sizes], min_n=cfg.min_fit_n
    )
    log2_linear = None
    if cfg.locate_extrema:
        log2_linear = fit_log2_linear(
            [(s.n_atoms, s.extremum_value) for s in sizes if s.extremum_value is not None],
            min_n=cfg.min_fit_n,
        )
    report = ScalingReport(
        model=model,
        lambda_c=lambda_c,
        sizes=sizes,
        power_law=power_law,
        log2_linear=log2_linear,
        extremum_side=side,
    )
    logger.info(
        "scaling_finished",
        model=model,
        mu=power_law.mu,
        log2_slope=log2_linear.exponent_or_slope if log2_linear else None,
    )
    if report_path is not None:
        (store or ResultStore()).write_report(report, report_path)
    return report
