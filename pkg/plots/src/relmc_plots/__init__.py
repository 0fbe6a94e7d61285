"""Batch figure generation for relmc CSV artifacts.

This package reads only the documented CSV files ('#'-prefixed
``key = value`` metadata lines, comma-separated header, float rows) and
never imports the solver package, so the two can be installed and tested
independently.
"""

from .csvio import read_csv
from .figures import FigureSpec, plot_convergence, plot_ratio_table, plot_solution

__all__ = [
    "FigureSpec",
    "plot_convergence",
    "plot_ratio_table",
    "plot_solution",
    "read_csv",
]

__version__ = "0.1.0"
