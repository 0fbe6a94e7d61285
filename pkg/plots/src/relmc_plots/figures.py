"""Figure builders for solver CSV artifacts.

Three figure kinds: solution overlays (particle solution vs initial
datum vs reference, with an optional inset showing the histogram of the
spatial derivative), log-log convergence curves with N^{-1/2} and
N^{-1/3} guide lines, and a small table of MC/GBMC error ratios.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import read_csv, require_columns

__all__ = ["FigureSpec", "plot_solution", "plot_convergence", "plot_ratio_table"]

KINDS = ("solution-overlay", "convergence", "ratio-table")


@dataclass
class FigureSpec:
    """What to draw and where to put it."""

    input: str
    output: str
    kind: str = "solution-overlay"
    reference: str | None = None
    initial: str | None = None
    inset: bool = False
    xlabel: str = "x"
    ylabel: str = "u"
    dpi: int = 150
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}, expected one of {KINDS}")


def _value_columns(columns) -> list[str]:
    return [name for name in columns if name != "x"]


def _save(fig, spec: FigureSpec) -> str:
    parent = os.path.dirname(spec.output)
    if parent:
        os.makedirs(parent, exist_ok=True)
    fig.savefig(spec.output, dpi=spec.dpi, bbox_inches="tight")
    plt.close(fig)
    return spec.output


def _overlay(ax, path, style, label_prefix=""):
    columns, _ = read_csv(path)
    require_columns(columns, ["x"], path)
    names = _value_columns(columns)
    if not names:
        raise ValueError(f"{path}: no value columns besides x")
    for name in names:
        label = f"{label_prefix}{name}" if len(names) > 1 else label_prefix.rstrip()
        ax.plot(columns["x"], columns[name], style, label=label or name)
    return columns


def plot_solution(spec: FigureSpec) -> str:
    """Overlay the computed snapshot with the initial datum and a
    reference curve; optionally inset the derivative histogram.

    A missing reference or initial file degrades to a warning so one
    figure command works for runs with and without references.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    columns = _overlay(ax, spec.input, "-", "computed ")
    for path, style, tag in ((spec.initial, ":", "initial "),
                             (spec.reference, "--", "reference ")):
        if path is None:
            continue
        if not os.path.exists(path):
            warnings.warn(f"{tag.strip()} file {path} not found, overlay omitted")
            continue
        _overlay(ax, path, style, tag)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    ax.legend(loc="best", fontsize=8)

    if spec.inset:
        x = columns["x"]
        u = columns[_value_columns(columns)[0]]
        if x.size >= 3:
            slope = np.gradient(u, x)
            sub = ax.inset_axes([0.08, 0.55, 0.3, 0.35])
            sub.hist(slope, bins=min(40, max(5, x.size // 10)), color="gray")
            sub.set_title("du/dx histogram", fontsize=7)
            sub.tick_params(labelsize=6)
    return _save(fig, spec)


def guide_line(ns, anchor_n, anchor_e, exponent):
    """Power-law guide through (anchor_n, anchor_e)."""
    ns = np.asarray(ns, dtype=float)
    return anchor_e * (ns / anchor_n) ** exponent


def plot_convergence(spec: FigureSpec) -> str:
    """Log-log error-vs-N curves plus N^{-1/2} and N^{-1/3} guides."""
    columns, _ = read_csv(spec.input)
    require_columns(columns, ["N"], spec.input)
    errors = {name[6:]: columns[name] for name in columns
              if name.startswith("error_")}
    if not errors:
        raise ValueError(f"{spec.input}: no error_* columns")
    ns = columns["N"]

    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for method, errs in errors.items():
        ax.loglog(ns, errs, "o-", label=method)
    first = next(iter(errors.values()))
    for exponent, style in ((-0.5, "--"), (-1.0 / 3.0, ":")):
        ax.loglog(ns, guide_line(ns, ns[0], first[0], exponent), style,
                  color="gray", label=f"N^{{{exponent:.2g}}}")
    ax.set_xlabel(spec.xlabel if spec.xlabel != "x" else "N")
    ax.set_ylabel(spec.ylabel if spec.ylabel != "u" else "error")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, spec)


def plot_ratio_table(spec: FigureSpec) -> str:
    """Render the N-vs-ratio columns of an error report as a table."""
    columns, _ = read_csv(spec.input)
    require_columns(columns, ["N"], spec.input)
    ratio_names = [n for n in columns if n.startswith("ratio")]
    if not ratio_names:
        raise ValueError(f"{spec.input}: no ratio columns")
    fig, ax = plt.subplots(figsize=(4.0, 0.5 + 0.3 * len(columns["N"])))
    ax.axis("off")
    cells = [[f"{int(n)}"] + [f"{columns[r][i]:.2f}" for r in ratio_names]
             for i, n in enumerate(columns["N"])]
    table = ax.table(cellText=cells, colLabels=["N"] + ratio_names,
                     loc="center")
    table.auto_set_font_size(False)
    table.set_fontsize(9)
    return _save(fig, spec)
