"""Result persistence and plot export."""

from .plots import panels_for, plot_points
from .results import ResultStore

__all__ = ["ResultStore", "panels_for", "plot_points"]
