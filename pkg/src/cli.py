"""Command-line interface for collective-spin correlation sweeps."""

import asyncio
import functools
import json
from collections.abc import Callable
from pathlib import Path
from typing import Any, TypeVar

import click
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from .config import LOG_LEVELS, Settings, env_var
from .correlations import locate_thermo_maximum, mean_field, quantum_discord, thermo_m
from .errors import NumericalError, StateValidationError
from .models import SweepConfig, XState
from .pipeline import run_scaling, run_sweep
from .storage import ResultStore, plot_points
from .utils import setup_logging

console = Console()

F = TypeVar("F", bound=Callable[..., Any])

EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def exit_codes(func: F) -> F:
    """Map validation failures to exit 1 and numerical failures to exit 2."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except (ValidationError, StateValidationError, OSError, json.JSONDecodeError) as exc:
            console.print(f"[red]✗ Invalid input:[/red] {exc}")
            raise click.exceptions.Exit(EXIT_VALIDATION) from exc
        except NumericalError as exc:
            console.print(f"[red]✗ Numerical failure:[/red] {exc}")
            raise click.exceptions.Exit(EXIT_NUMERICAL) from exc

    return wrapper  # type: ignore[return-value]


def sweep_options(func: F) -> F:
    """Flags shared by ``sweep`` and ``scaling``; each overrides its JSON counterpart."""
    options = [
        click.option(
            "--config", "config_path", type=click.Path(path_type=Path), help="JSON config"
        ),
        click.option(
            "--model",
            type=click.Choice(["dicke", "lmg", "thermo_dicke", "thermo_lmg"]),
            help="Model to sweep",
        ),
        click.option("--n-atoms", "-n", type=int, multiple=True, help="System size (repeatable)"),
        click.option(
            "--lambda-range",
            type=(float, float, int),
            default=None,
            help="LO HI STEPS",
        ),
        click.option("--lambda-units", type=click.Choice(["absolute", "critical"])),
        click.option("--omega", type=float, help="Cavity frequency (Dicke)"),
        click.option("--delta", type=float, help="Atomic splitting (Dicke)"),
        click.option("--gamma", type=float, help="Anisotropy (LMG)"),
        click.option("--n-tr", help="Displaced-Fock truncation or 'auto' (Dicke)"),
        click.option("--output", "output_path", type=click.Path(path_type=Path)),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"])),
        click.option("--parallelism", "-j", type=int, help="Worker processes"),
        click.option("--min-fit-n", type=int, help="Smallest N used by the scaling fits"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def load_config(settings: Settings, config_path: Path | None, **flags: Any) -> SweepConfig:
    """JSON recipe, then CLI flags, then environment defaults for untouched fields."""
    n_atoms = flags.pop("n_atoms", ()) or None
    n_tr = flags.pop("n_tr", None)
    if n_tr is not None and n_tr != "auto":
        n_tr = int(n_tr)
    overrides = {**flags, "n_atoms": list(n_atoms) if n_atoms else None, "n_tr": n_tr}
    overrides = {"format" if k == "fmt" else k: v for k, v in overrides.items()}

    cfg = SweepConfig.load(config_path, overrides)
    updates: dict[str, Any] = {}
    if "parallelism" not in cfg.model_fields_set:
        updates["parallelism"] = settings.workers
    if "output_path" not in cfg.model_fields_set:
        updates["output_path"] = settings.output_dir / f"{cfg.model}.{cfg.format}"
    return cfg.model_copy(update=updates)


def cell(value: float | None, digits: int = 6) -> str:
    return "" if value is None else f"{value:.{digits}f}"


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging")
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default="INFO",
    envvar=env_var("log_level"),
    help="Log level",
)
@click.option(
    "--json-logs", is_flag=True, envvar=env_var("json_logs"), help="Output logs as JSON"
)
@click.option(
    "--workers",
    type=click.IntRange(min=1),
    default=1,
    envvar=env_var("workers"),
    help="Worker processes when a config sets no parallelism",
)
@click.option(
    "--output-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("results"),
    envvar=env_var("output_dir"),
    help="Default directory for sweeps and reports",
)
@click.pass_context
def main(
    ctx: click.Context,
    verbose: bool,
    log_level: str,
    json_logs: bool,
    workers: int,
    output_dir: Path,
) -> None:
    """Collective Discord - pairwise correlations of the Dicke and LMG models."""
    ctx.ensure_object(dict)
    settings = Settings(
        log_level="DEBUG" if verbose else log_level.upper(),  # type: ignore[arg-type]
        json_logs=json_logs,
        workers=workers,
        output_dir=output_dir,
    )
    setup_logging(level=settings.log_level, json_output=settings.json_logs)
    ctx.obj["settings"] = settings
    ctx.obj["store"] = ResultStore()


@main.command()
@sweep_options
@click.option("--derivative/--no-derivative", "compute_derivative", default=None)
@click.option("--refine-near-critical", is_flag=True, default=None, help="Densify around λc")
@click.option("--plot", is_flag=True, default=None, help="Write SVG plots next to the output")
@click.pass_context
@exit_codes
def sweep(ctx: click.Context, config_path: Path | None, **flags: Any) -> None:
    """Evaluate correlations over a λ grid and write one row per (N, λ)."""
    cfg = load_config(ctx.obj["settings"], config_path, **flags)
    result = asyncio.run(run_sweep(cfg, store=ctx.obj["store"]))

    stats = ctx.obj["store"].get_stats(result.points)
    table = Table(title=f"Sweep: {cfg.model}")
    table.add_column("Rows", justify="right", style="cyan")
    table.add_column("Failed", justify="right", style="red")
    table.add_column("Not converged", justify="right", style="yellow")
    table.add_column("Output", style="green")
    table.add_row(
        str(len(result.points)),
        str(stats["failed"]),
        str(stats["not_converged"]),
        str(result.output_path),
    )
    console.print(table)
    if stats["failed"]:
        console.print(f"[yellow]! {stats['failed']} points failed; see the failure column[/yellow]")
    for path in result.plots:
        console.print(f"[green]✓ Plot {path}[/green]")


@main.command()
@sweep_options
@click.option("--extremum-window", type=(float, float), default=None, help="LO HI in units of λc")
@click.option(
    "--extrema/--no-extrema", "locate_extrema", default=None, help="Fit the dD/dλ extremum too"
)
@click.option("--report", "report_path", type=click.Path(path_type=Path), default=None)
@click.pass_context
@exit_codes
def scaling(
    ctx: click.Context, config_path: Path | None, report_path: Path | None, **flags: Any
) -> None:
    """Fit D(λc) ~ N^-μ and the log2 N growth of the dD/dλ extremum."""
    settings: Settings = ctx.obj["settings"]
    cfg = load_config(settings, config_path, **flags)
    report_path = report_path or settings.output_dir / f"scaling_{cfg.model}.json"
    report = asyncio.run(run_scaling(cfg, store=ctx.obj["store"], report_path=report_path))

    sizes = Table(title=f"Finite-size data: {report.model} (λc = {report.lambda_c:.6g})")
    sizes.add_column("N", justify="right", style="cyan")
    sizes.add_column("D(λc)", justify="right")
    sizes.add_column(f"λ* ({report.extremum_side})", justify="right")
    sizes.add_column("dD/dλ at λ*", justify="right")
    for s in report.sizes:
        sizes.add_row(
            str(s.n_atoms),
            cell(s.discord_at_critical),
            cell(s.extremum_lambda),
            cell(s.extremum_value),
        )
    console.print(sizes)

    fits = Table(title="Scaling fits")
    fits.add_column("Law", style="cyan")
    fits.add_column("Slope", justify="right", style="green")
    fits.add_column("Intercept", justify="right")
    fits.add_column("r²", justify="right")
    for fit in (report.power_law, report.log2_linear):
        if fit is not None:
            fits.add_row(
                fit.kind, cell(fit.exponent_or_slope), cell(fit.intercept), cell(fit.r_squared)
            )
    console.print(fits)
    if report.power_law is not None:
        console.print(f"[bold]μ = {report.power_law.mu:.4f}[/bold]")
    console.print(f"[green]✓ Report {report_path}[/green]")


@main.command()
@click.option("--model", type=click.Choice(["dicke", "lmg"]), default="dicke")
@click.option(
    "--lambda-range", type=(float, float, int), default=(0.0, 3.0, 31), help="LO HI STEPS"
)
@click.option("--lambda-units", type=click.Choice(["absolute", "critical"]), default="critical")
@click.option("--omega", type=float, default=1.0)
@click.option("--delta", type=float, default=1.0)
@click.option("--output", "output_path", type=click.Path(path_type=Path), default=None)
@click.pass_context
@exit_codes
def thermo(
    ctx: click.Context,
    model: str,
    lambda_range: tuple[float, float, int],
    lambda_units: str,
    omega: float,
    delta: float,
    output_path: Path | None,
) -> None:
    """Closed-form thermodynamic-limit correlations over a λ grid."""
    cfg = SweepConfig(
        model=f"thermo_{model}",  # type: ignore[arg-type]
        lambda_range=lambda_range,
        lambda_units=lambda_units,  # type: ignore[arg-type]
        omega=omega,
        delta=delta,
        output_path=output_path or Path("thermo.csv"),
    )
    result = asyncio.run(
        run_sweep(cfg, store=ctx.obj["store"], persist=output_path is not None)
    )

    table = Table(title=f"Thermodynamic limit: {model} (λc = {cfg.lambda_c:.6g})")
    for name in ("λ", "β²", "M", "D", "C", "I"):
        table.add_column(name, justify="right", style="cyan" if name == "λ" else None)
    for point in result.points:
        mf = mean_field(cfg.base_model, point.coupling, omega, delta)
        table.add_row(
            cell(point.coupling, 4),
            cell(mf.beta_sq),
            cell(thermo_m(mf.beta_sq)),
            cell(point.discord),
            cell(point.classical),
            cell(point.mutual_info),
        )
    console.print(table)

    lambda_star, value = locate_thermo_maximum(cfg.base_model, omega, delta)
    console.print(
        f"[bold]D max = {value:.6f} at λ = {lambda_star:.6f} "
        f"({lambda_star / cfg.lambda_c:.4f} λc)[/bold]"
    )
    if result.output_path is not None:
        console.print(f"[green]✓ Wrote {result.output_path}[/green]")


@main.command()
@click.argument("v_plus", type=float)
@click.argument("v_minus", type=float)
@click.argument("w", type=float)
@click.argument("y", type=float)
@click.argument("u_re", type=float)
@click.argument("u_im", type=float, default=0.0, required=False)
@click.option("--tol", type=float, default=1e-12, help="Validation slack")
@exit_codes
def xstate(
    v_plus: float, v_minus: float, w: float, y: float, u_re: float, u_im: float, tol: float
) -> None:
    """Correlations of a raw X state given as v+ v- w y Re(u) [Im(u)]."""
    rho = XState.model_validate(
        {"v_plus": v_plus, "v_minus": v_minus, "w": w, "y": y, "u": complex(u_re, u_im)},
        context={"tol": tol},
    )
    result = quantum_discord(rho)

    table = Table(show_header=False, box=None)
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("discord", cell(result.discord, 10))
    table.add_row("classical", cell(result.classical, 10))
    table.add_row("mutual_info", cell(result.mutual_info, 10))
    table.add_row("concurrence", cell(result.concurrence, 10))
    table.add_row("theta", cell(result.optimal_angles.theta, 8))
    table.add_row("phi", cell(result.optimal_angles.phi, 8))
    console.print(table)


@main.command()
@click.argument("results", type=click.Path(exists=True, path_type=Path))
@click.option("--output-dir", type=click.Path(path_type=Path), default=None)
@click.pass_context
@exit_codes
def plot(ctx: click.Context, results: Path, output_dir: Path | None) -> None:
    """Regenerate SVG plots from a sweep CSV or JSON file."""
    points = ctx.obj["store"].read_points(results)
    written = plot_points(points, output_dir or results.parent)
    if not written:
        console.print("[yellow]! No plottable rows[/yellow]")
    for path in written:
        console.print(f"[green]✓ Plot {path}[/green]")


if __name__ == "__main__":
    main()
