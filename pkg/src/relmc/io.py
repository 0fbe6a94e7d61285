"""CSV artifacts.

One fixed format everywhere: '#'-prefixed ``key = value`` metadata lines,
then a comma-separated header row, then data rows with floats printed at 17
significant digits so identical runs produce byte-identical files.
"""

from __future__ import annotations

import os
from typing import Mapping, Sequence

import numpy as np

from .results import RunResult

__all__ = [
    "write_csv",
    "read_csv",
    "write_result",
    "write_ensembles",
    "write_error_report",
]


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, columns: Mapping[str, Sequence], metadata: Mapping | None = None):
    """Write named columns of equal length; metadata goes into '#' lines."""
    names = list(columns)
    arrays = [np.asarray(columns[k]) for k in names]
    if len({a.shape[0] for a in arrays}) > 1:
        raise ValueError("columns have unequal lengths")
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in (metadata or {}).items():
            fh.write(f"# {key} = {_fmt(value)}\n")
        fh.write(",".join(names) + "\n")
        for row in zip(*arrays):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    """Inverse of write_csv; metadata values come back as strings."""
    metadata: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                metadata[key.strip()] = value.strip()
                continue
            if header is None:
                header = line.split(",")
            else:
                rows.append(line.split(","))
    if header is None:
        raise ValueError(f"{path}: no header row")
    data = np.asarray(rows, dtype=float) if rows else np.empty((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}, metadata


def write_result(
    path,
    result: RunResult,
    component_names: Sequence[str] | None = None,
    time: float | None = None,
):
    """One snapshot of a run as (x, components...) columns."""
    t = max(result.snapshots) if time is None else time
    values = result.snapshots[t]
    if component_names is None:
        component_names = (
            ["u"] if values.shape[0] == 1 else [f"u{i + 1}" for i in range(values.shape[0])]
        )
    columns = {"x": result.x}
    for name, comp in zip(component_names, values):
        columns[name] = comp
    meta = dict(result.params)
    meta["t"] = t
    write_csv(path, columns, meta)


def write_ensembles(path, ensembles, metadata: Mapping | None = None):
    """Particle dump: (family, position, velocity, mass) rows."""
    fam = np.concatenate([np.full(e.n, h) for h, e in enumerate(ensembles)])
    write_csv(
        path,
        {
            "family": fam,
            "position": np.concatenate([e.x for e in ensembles]),
            "velocity": np.concatenate([e.v for e in ensembles]),
            "mass": np.concatenate([e.m for e in ensembles]),
        },
        metadata,
    )


def write_error_report(path, report, metadata: Mapping | None = None):
    """Convergence-study table: N, per-method errors, MC/GBMC ratios and
    the per-method fitted slopes (constant columns, kept in the table so
    the file is self-contained for plotting)."""
    columns: dict[str, np.ndarray] = {"N": np.asarray(report.ns)}
    for method, errs in report.errors.items():
        columns[f"error_{method}"] = np.asarray(errs)
    if "mc" in report.errors and "gbmc" in report.errors:
        columns["ratio"] = np.asarray(report.errors["mc"]) / np.asarray(report.errors["gbmc"])
    if "mc_opt" in report.errors and "gbmc" in report.errors:
        columns["ratio_opt"] = np.asarray(report.errors["mc_opt"]) / np.asarray(
            report.errors["gbmc"]
        )
    for method, slope in report.slopes.items():
        columns[f"slope_{method}"] = np.full(len(report.ns), slope)
    meta = dict(metadata or {})
    meta.setdefault("p", report.p)
    meta.setdefault("runs", report.runs)
    write_csv(path, columns, meta)
