"""Tests for sweep and scaling orchestration."""

import csv
import math

import numpy as np
import pytest

from src.errors import NumericalError, StateValidationError
from src.models import CSV_COLUMNS, CorrelationPoint, SweepConfig
from src.pipeline import (
    PointEvaluator,
    build_lambda_grid,
    evaluate_points,
    fill_derivatives,
    run_scaling,
    run_sweep,
)
from src.storage import ResultStore, panels_for

LAMBDA_PEAK = 0.6
PEAK_WIDTH = 0.2
SLOPE_A, SLOPE_B = 0.377, -0.401


def _antiderivative(x: float) -> float:
    return x - x**3 / (3 * PEAK_WIDTH**2)


def synthetic_point(n_atoms: int | None, coupling: float) -> CorrelationPoint:
    """D(lambda_c) = 0.8 N^(-2/3); dD/dlambda peaks at 0.6 with height 0.377 log2 N - 0.401."""
    height = SLOPE_A * math.log2(n_atoms) + SLOPE_B
    shape = _antiderivative(coupling - LAMBDA_PEAK) - _antiderivative(0.5 - LAMBDA_PEAK)
    discord = 0.8 * n_atoms ** (-2 / 3) + height * shape
    return CorrelationPoint(
        model="dicke", n_atoms=n_atoms, coupling=coupling, discord=discord, classical=0.0
    )


def quadratic_point(n_atoms: int | None, coupling: float) -> CorrelationPoint:
    return CorrelationPoint(
        model="lmg",
        n_atoms=n_atoms,
        coupling=coupling,
        discord=coupling**2,
        classical=coupling / 2,
    )


class FailingEvaluator(PointEvaluator):
    """Fails every point above lambda = 1."""

    def _lmg(self, base):
        if base.coupling > 1.0:
            raise NumericalError("synthetic failure", coupling=base.coupling)
        return base.model_copy(update={"discord": base.coupling, "classical": 0.0})


class TestLambdaGrid:
    """Tests for sweep grids."""

    def test_critical_units(self):
        """Test critical units scale the range by lambda_c."""
        cfg = SweepConfig(
            model="thermo_dicke", lambda_range=(0.0, 2.0, 5), lambda_units="critical", omega=4.0
        )
        assert np.allclose(build_lambda_grid(cfg), [0.0, 0.5, 1.0, 1.5, 2.0])

    def test_refinement_near_critical(self):
        """Test geometric refinement adds points on both sides of lambda_c."""
        cfg = SweepConfig(
            model="thermo_lmg",
            lambda_range=(0.0, 2.0, 5),
            refine_near_critical=True,
            refine_levels=3,
        )
        grid = build_lambda_grid(cfg)
        assert np.all(np.diff(grid) > 0)
        for offset in (0.25, 0.125, 0.0625):
            assert np.any(np.isclose(grid, 1.0 - offset))
            assert np.any(np.isclose(grid, 1.0 + offset))
        assert grid.size == 5 + 6

    def test_default_spacing_follows_derivative_step(self):
        """Test (lo, hi) without a step count spaces the grid at derivative_step * lambda_c."""
        cfg = SweepConfig(model="thermo_dicke", lambda_range=(0.0, 1.0))
        grid = build_lambda_grid(cfg)
        assert grid.size == 2001
        assert np.allclose(np.diff(grid), 1e-3 * cfg.lambda_c)

    def test_default_spacing_in_critical_units(self):
        """Test critical units count the range in lambda_c directly."""
        cfg = SweepConfig(
            model="thermo_lmg",
            lambda_range=(0.5, 1.5),
            lambda_units="critical",
            tolerances={"derivative_step": 0.01},
        )
        grid = build_lambda_grid(cfg)
        assert grid.size == 101
        assert np.allclose(np.diff(grid), 0.01)


class TestEvaluation:
    """Tests for point evaluation."""

    async def test_sorted_output(self):
        """Test results come back ordered by (N, lambda)."""
        tasks = [(8, 0.3), (4, 0.9), (8, 0.1), (4, 0.2)]
        points = await evaluate_points(tasks, quadratic_point)
        assert [(p.n_atoms, p.coupling) for p in points] == [
            (4, 0.2),
            (4, 0.9),
            (8, 0.1),
            (8, 0.3),
        ]

    def test_failure_is_recorded(self):
        """Test numerical errors become a failure cell instead of an exception."""
        evaluator = FailingEvaluator("lmg")
        point = evaluator(4, 1.5)
        assert not point.converged
        assert point.discord is None
        assert point.failure.startswith("NumericalError: synthetic failure")
        assert evaluator(4, 0.5).failure is None

    def test_thermo_point(self):
        """Test thermodynamic points carry no size and the validation tolerance."""
        point = PointEvaluator("thermo_dicke")(None, 0.64)
        assert point.n_atoms is None
        assert point.concurrence_scaled is None
        assert point.discord > 0.1
        assert point.tolerance == 1e-12

    def test_lmg_point(self):
        """Test a small LMG point fills every finite-size column."""
        point = PointEvaluator("lmg", gamma=0.1)(8, 0.5)
        assert point.failure is None
        assert point.converged
        assert point.omega is None
        assert point.gamma == 0.1
        assert point.mutual_info == pytest.approx(point.discord + point.classical)
        assert point.concurrence_scaled is not None
        assert point.concurrence_wootters_scaled is not None

    def test_dicke_point_fixed_truncation(self):
        """Test a fixed n_tr is reported back with the eigensolver tolerance."""
        point = PointEvaluator("dicke", n_tr=12)(4, 0.3)
        assert point.failure is None
        assert point.n_tr_used == 12
        assert point.tolerance == 1e-10
        assert point.gamma is None

    def test_concurrence_columns_agree(self):
        """Test both concurrence routes land in the row and agree at lambda_c."""
        point = PointEvaluator("dicke", n_tr=30)(32, 0.5)
        assert point.concurrence_wootters_scaled == pytest.approx(
            point.concurrence_scaled, abs=1e-8
        )

    def test_dicke_zero_coupling_row(self):
        """Test N = 2 at lambda = 0 is an uncorrelated product with E = -delta."""
        point = PointEvaluator("dicke", delta=1.5)(2, 0.0)
        assert point.failure is None
        assert point.discord == pytest.approx(0.0, abs=1e-10)
        assert point.classical == pytest.approx(0.0, abs=1e-10)
        assert point.energy == pytest.approx(-1.5, abs=1e-10)

    def test_lmg_discord_barely_depends_on_gamma(self):
        """Test the anisotropy moves the N = 256 discord by less than 0.02."""
        isotropic = PointEvaluator("lmg", gamma=0.0)(256, 0.5)
        anisotropic = PointEvaluator("lmg", gamma=0.5)(256, 0.5)
        assert abs(isotropic.discord - anisotropic.discord) < 0.02


class TestDerivatives:
    """Tests for derivative filling."""

    def test_per_family(self):
        """Test each (model, N) family is differentiated separately and failures skipped."""
        points = [quadratic_point(n, lam) for n in (4, 8) for lam in np.linspace(0, 1, 11)]
        points.append(
            CorrelationPoint(model="lmg", n_atoms=8, coupling=1.2, converged=False, failure="x")
        )
        fill_derivatives(points)
        for point in points[:-1]:
            if 0 < point.coupling < 1:
                assert point.d_discord_d_lambda == pytest.approx(2 * point.coupling)
            assert point.d_classical_d_lambda == pytest.approx(0.5)
        assert points[-1].d_discord_d_lambda is None
        assert points[-1].d_classical_d_lambda is None


class TestRunSweep:
    """Tests for full sweeps."""

    async def test_thermo_sweep_writes_csv(self, tmp_path):
        """Test the CSV header order and one row per grid point."""
        cfg = SweepConfig(
            model="thermo_dicke",
            lambda_range=(0.0, 3.0, 31),
            lambda_units="critical",
            output_path="thermo.csv",
        )
        result = await run_sweep(cfg, store=ResultStore(tmp_path))

        with result.output_path.open() as handle:
            reader = csv.reader(handle)
            header = next(reader)
            rows = list(reader)
        assert tuple(header) == CSV_COLUMNS
        assert len(rows) == 31
        assert all(row[header.index("N")] == "" for row in rows)
        assert result.curves[0].n_atoms is None

    async def test_failures_stay_in_output(self, tmp_path):
        """Test failed points are written with their failure text."""
        cfg = SweepConfig(
            model="lmg", n_atoms=[4], lambda_range=(0.0, 2.0, 5), output_path="lmg.csv"
        )
        store = ResultStore(tmp_path)
        result = await run_sweep(cfg, evaluator=FailingEvaluator("lmg"), store=store)

        stats = store.get_stats(result.points)
        assert stats["failed"] == 2
        assert stats["not_converged"] == 2
        rows = store.read_points(result.output_path)
        assert [row.failure is not None for row in rows] == [False, False, False, True, True]
        assert rows[0].d_discord_d_lambda == pytest.approx(1.0)

    async def test_json_and_plot(self, tmp_path):
        """Test JSON output and SVG plots next to it."""
        cfg = SweepConfig(
            model="lmg",
            n_atoms=[4, 8],
            lambda_range=(0.0, 1.0, 6),
            output_path="sweep.json",
            format="json",
            plot=True,
        )
        result = await run_sweep(cfg, evaluator=quadratic_point, store=ResultStore(tmp_path))
        assert result.output_path.suffix == ".json"
        assert [p.name for p in result.plots] == ["lmg.svg"]
        assert ("d_classical_d_lambda", "dC/dλ") in panels_for(result.points)
        assert len(ResultStore(tmp_path).read_points(result.output_path)) == 12

    async def test_parallel_run_is_deterministic(self):
        """Test worker processes give byte-identical rows."""
        base = {
            "model": "lmg",
            "n_atoms": [6, 10],
            "lambda_range": (0.2, 1.4, 4),
            "gamma": 0.2,
        }
        serial = await run_sweep(SweepConfig(**base), persist=False)
        parallel = await run_sweep(SweepConfig(**base, parallelism=2), persist=False)
        assert [p.to_row() for p in serial.points] == [p.to_row() for p in parallel.points]

    async def test_parallel_dicke_run_is_deterministic(self):
        """Test the n_tr convergence loop gives the same rows in worker processes."""
        base = {"model": "dicke", "n_atoms": [4, 6], "lambda_range": (0.3, 0.8, 3)}
        serial = await run_sweep(SweepConfig(**base), persist=False)
        parallel = await run_sweep(SweepConfig(**base, parallelism=2), persist=False)
        assert [p.to_row() for p in serial.points] == [p.to_row() for p in parallel.points]


class RecordingEvaluator:
    """Synthetic evaluator that remembers every (N, lambda) it was asked for."""

    def __init__(self):
        self.calls: list[tuple[int | None, float]] = []

    def __call__(self, n_atoms: int | None, coupling: float) -> CorrelationPoint:
        self.calls.append((n_atoms, coupling))
        return synthetic_point(n_atoms, coupling)


class TestRunScaling:
    """Tests for the scaling workflow."""

    async def test_synthetic_laws_are_recovered(self, tmp_path):
        """Test both fits on data built from known laws."""
        cfg = SweepConfig(model="dicke", n_atoms=[16, 32, 64, 128], lambda_range=(0.0, 1.0))
        report_path = tmp_path / "scaling.json"
        report = await run_scaling(
            cfg, evaluator=synthetic_point, store=ResultStore(tmp_path), report_path=report_path
        )

        assert report.extremum_side == "max"
        assert report.power_law.mu == pytest.approx(2 / 3, abs=1e-12)
        assert report.log2_linear.exponent_or_slope == pytest.approx(SLOPE_A, rel=1e-3)
        for size in report.sizes:
            height = SLOPE_A * math.log2(size.n_atoms) + SLOPE_B
            assert size.extremum_lambda == pytest.approx(LAMBDA_PEAK, abs=2e-5)
            assert size.extremum_value == pytest.approx(height, rel=1e-4)
        assert ResultStore(tmp_path).read_report(report_path) == report

    async def test_window_spacing_follows_derivative_step(self):
        """Test the extremum window is sampled at derivative_step * lambda_c."""
        evaluator = RecordingEvaluator()
        cfg = SweepConfig(
            model="dicke",
            n_atoms=[16, 32, 64],
            lambda_range=(0.0, 1.0),
            tolerances={"derivative_step": 0.01},
        )
        await run_scaling(cfg, evaluator=evaluator)

        expected = np.linspace(0.9, 1.5, 61) * cfg.lambda_c
        batch = evaluator.calls[: 3 * (1 + expected.size)]
        window = np.array(sorted(lam for n, lam in batch if n == 16))
        assert window.size == expected.size + 1
        for lam in expected:
            assert np.min(np.abs(window - lam)) < 1e-12

    async def test_refinement_reevaluates_off_grid(self):
        """Test the extremum search asks for couplings between grid points."""
        evaluator = RecordingEvaluator()
        cfg = SweepConfig(model="dicke", n_atoms=[16, 32, 64], lambda_range=(0.0, 1.0))
        report = await run_scaling(cfg, evaluator=evaluator)

        expected = np.linspace(0.9, 1.5, 601) * cfg.lambda_c
        extra = evaluator.calls[3 * (1 + expected.size) :]
        assert {n for n, _ in extra} == {16, 32, 64}
        assert any(np.min(np.abs(expected - lam)) > 1e-6 for _, lam in extra)
        assert all(s.extremum_lambda is not None for s in report.sizes)

    async def test_extremum_stable_under_step_halving(self):
        """Test halving the derivative step moves lambda* by less than 4e-5."""
        sizes = [16, 32, 64]
        coarse = await run_scaling(
            SweepConfig(
                model="dicke",
                n_atoms=sizes,
                lambda_range=(0.0, 1.0),
                tolerances={"derivative_step": 2e-3},
            ),
            evaluator=synthetic_point,
        )
        fine = await run_scaling(
            SweepConfig(model="dicke", n_atoms=sizes, lambda_range=(0.0, 1.0)),
            evaluator=synthetic_point,
        )
        for a, b in zip(coarse.sizes, fine.sizes):
            assert abs(a.extremum_lambda - b.extremum_lambda) < 4e-5

    async def test_power_law_only(self):
        """Test locate_extrema=False evaluates lambda_c alone."""
        evaluator = RecordingEvaluator()
        cfg = SweepConfig(
            model="dicke", n_atoms=[16, 32, 64], lambda_range=(0.0, 1.0), locate_extrema=False
        )
        report = await run_scaling(cfg, evaluator=evaluator)
        assert sorted(evaluator.calls) == [(16, 0.5), (32, 0.5), (64, 0.5)]
        assert report.log2_linear is None
        assert report.power_law.mu == pytest.approx(2 / 3, abs=1e-12)

    async def test_needs_finite_model(self):
        """Test the thermodynamic limit cannot be scaled."""
        cfg = SweepConfig(model="thermo_lmg", lambda_range=(0.0, 1.0, 5))
        with pytest.raises(StateValidationError, match="finite-size"):
            await run_scaling(cfg)

    async def test_needs_three_sizes(self):
        """Test two sizes are not enough."""
        cfg = SweepConfig(model="lmg", n_atoms=[8, 16], lambda_range=(0.0, 1.0, 5))
        with pytest.raises(StateValidationError, match="three"):
            await run_scaling(cfg, evaluator=quadratic_point)


@pytest.mark.slow
async def test_lmg_critical_discord_exponent():
    """LMG D(lambda_c) decays as N^(-2/3); the fit uses the sizes from 4096 up."""
    cfg = SweepConfig(
        model="lmg",
        n_atoms=[256, 512, 1024, 2048, 4096, 8192, 16384, 32768],
        lambda_range=(0.0, 1.0),
        parallelism=4,
        min_fit_n=4096,
        locate_extrema=False,
    )
    report = await run_scaling(cfg)
    assert report.power_law.n_values == [4096, 8192, 16384, 32768]
    assert report.power_law.mu == pytest.approx(2 / 3, abs=0.05)


@pytest.mark.slow
async def test_dicke_critical_discord_exponent():
    """Dicke D(lambda_c) decays as N^(-2/3) over N = 64 .. 1024."""
    cfg = SweepConfig(
        model="dicke",
        n_atoms=[64, 128, 256, 512, 1024],
        lambda_range=(0.0, 1.0),
        parallelism=4,
        locate_extrema=False,
    )
    report = await run_scaling(cfg)
    assert report.power_law.mu == pytest.approx(2 / 3, abs=0.08)


@pytest.mark.slow
async def test_dicke_derivative_maximum_grows_with_log2_n():
    """Dicke (dD/dlambda)_max grows by 0.377 per doubling of N, within 15%."""
    cfg = SweepConfig(
        model="dicke", n_atoms=[64, 128, 256, 512], lambda_range=(0.0, 1.0), parallelism=4
    )
    report = await run_scaling(cfg)
    assert report.log2_linear.exponent_or_slope == pytest.approx(0.377, rel=0.15)
    peaks = [s.extremum_lambda / report.lambda_c for s in report.sizes]
    assert 1.0 <= peaks[-1] <= 1.1
    assert peaks == sorted(peaks, reverse=True)


@pytest.mark.slow
async def test_lmg_derivative_minimum_grows_with_log2_n():
    """LMG (dD/dlambda)_min falls by 0.044 per doubling of N, within 25%."""
    cfg = SweepConfig(
        model="lmg",
        n_atoms=[256, 512, 1024, 2048, 4096, 8192],
        lambda_range=(0.0, 1.0),
        parallelism=4,
    )
    report = await run_scaling(cfg)
    assert report.log2_linear.exponent_or_slope == pytest.approx(-0.044, rel=0.25)
    assert all(s.extremum_lambda < 1.0 for s in report.sizes)


@pytest.mark.slow
def test_dicke_strong_coupling_keeps_discord_not_concurrence():
    """At lambda = 2 lambda_c, N = 512: C_N < 0.05 while D stays above 0.4 max D."""
    evaluator = PointEvaluator("dicke")
    lambda_c = 0.5
    sampled = [evaluator(512, lambda_c * r).discord for r in np.linspace(1.0, 1.8, 17)]
    strong = evaluator(512, 2 * lambda_c)
    assert strong.concurrence_scaled < 0.05
    assert strong.discord > 0.4 * max(sampled)


@pytest.mark.slow
@pytest.mark.parametrize("ratio", [1.2, 1.6, 2.0])
def test_dicke_approaches_thermodynamic_limit(ratio):
    """N = 1024 discord is within 0.02 of the closed form well above lambda_c."""
    coupling = 0.5 * ratio
    finite = PointEvaluator("dicke")(1024, coupling)
    limit = PointEvaluator("thermo_dicke")(None, coupling)
    assert finite.discord == pytest.approx(limit.discord, abs=0.02)
