"""SVG line plots regenerated from persisted sweep points."""

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import structlog  # noqa: E402

from ..models import CorrelationPoint  # noqa: E402

logger = structlog.get_logger()

PANELS = (
    ("discord", "D (nats)"),
    ("classical", "C (nats)"),
    ("concurrence_scaled", "C_N"),
    ("d_discord_d_lambda", "dD/dλ"),
    ("d_classical_d_lambda", "dC/dλ"),
)

plt.rcParams.update(
    {
        "font.size": 8,
        "lines.linewidth": 1.2,
        "axes.spines.right": False,
        "axes.spines.top": False,
        "svg.hashsalt": "collective-discord",
        "savefig.bbox": "tight",
    }
)


Families = dict[str, dict[int | None, list[CorrelationPoint]]]


def _families(points: list[CorrelationPoint]) -> Families:
    grouped: Families = defaultdict(lambda: defaultdict(list))
    for point in sorted(points, key=lambda p: p.sort_key):
        if point.failure is None:
            grouped[point.model][point.n_atoms].append(point)
    return grouped


def panels_for(points: list[CorrelationPoint]) -> list[tuple[str, str]]:
    """The (field, label) panels that have at least one value among the points."""
    return [
        (name, label)
        for name, label in PANELS
        if any(getattr(p, name) is not None for p in points)
    ]


def plot_points(points: list[CorrelationPoint], directory: str | Path) -> list[Path]:
    """One SVG per model: a panel per quantity, one line per size."""
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for model, by_size in sorted(_families(points).items()):
        panels = panels_for([p for family in by_size.values() for p in family])
        if not panels:
            continue
        fig, axes = plt.subplots(len(panels), 1, figsize=(3.4, 1.9 * len(panels)), sharex=True)
        axes = list(axes) if len(panels) > 1 else [axes]

        for ax, (name, label) in zip(axes, panels):
            for n_atoms, family in sorted(by_size.items(), key=lambda item: item[0] or 0):
                pairs = [
                    (p.coupling, getattr(p, name)) for p in family if getattr(p, name) is not None
                ]
                if not pairs:
                    continue
                xs, ys = zip(*pairs)
                ax.plot(xs, ys, label="N → ∞" if n_atoms is None else f"N = {n_atoms}")
            ax.set_ylabel(label)
        axes[-1].set_xlabel("λ")
        axes[0].legend(frameon=False, fontsize=6)
        axes[0].set_title(model)

        target = out_dir / f"{model}.svg"
        fig.savefig(target, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(target)
        logger.info("plot_written", path=str(target), model=model, sizes=len(by_size))
    return written
