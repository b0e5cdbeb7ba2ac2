"""CSV and JSON persistence for sweep points and scaling reports."""

import csv
import json
from collections import Counter
from pathlib import Path

import structlog

from ..models import CSV_COLUMNS, CorrelationPoint, ScalingReport

logger = structlog.get_logger()


class ResultStore:
    """File-backed store for sweep output.

    Relative paths resolve against ``root``; parent directories are
    created on write.
    """

    def __init__(self, root: str | Path = "."):
        self.root = Path(root)
        self.logger = logger.bind(component="results")

    def resolve(self, path: str | Path) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.root / path

    def write_points(
        self, points: list[CorrelationPoint], path: str | Path, fmt: str | None = None
    ) -> Path:
        """Write points in the fixed column order; format follows ``fmt`` or the suffix."""
        target = self.resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        fmt = fmt or ("json" if target.suffix == ".json" else "csv")

        if fmt == "json":
            payload = [point.model_dump(mode="json") for point in points]
            target.write_text(json.dumps(payload, indent=2) + "\n")
        else:
            with target.open("w", newline="") as handle:
                writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS, lineterminator="\n")
                writer.writeheader()
                for point in points:
                    writer.writerow(point.to_row())

        self.logger.info("sweep_written", path=str(target), format=fmt, rows=len(points))
        return target

    def read_points(self, path: str | Path) -> list[CorrelationPoint]:
        target = self.resolve(path)
        if target.suffix == ".json":
            data = json.loads(target.read_text())
            return [CorrelationPoint.model_validate(item) for item in data]
        with target.open(newline="") as handle:
            return [CorrelationPoint.from_row(row) for row in csv.DictReader(handle)]

    def write_report(self, report: ScalingReport, path: str | Path) -> Path:
        target = self.resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(report.model_dump_json(indent=2) + "\n")
        self.logger.info("scaling_report_written", path=str(target), model=report.model)
        return target

    def read_report(self, path: str | Path) -> ScalingReport:
        return ScalingReport.model_validate_json(self.resolve(path).read_text())

    def get_stats(self, points: list[CorrelationPoint]) -> dict[str, int]:
        """Row counts per model plus failure and non-convergence totals."""
        counts = Counter(point.model for point in points)
        stats = dict(sorted(counts.items()))
        stats["failed"] = sum(1 for point in points if point.failure)
        stats["not_converged"] = sum(1 for point in points if not point.converged)
        return stats
