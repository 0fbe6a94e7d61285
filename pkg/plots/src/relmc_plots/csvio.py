"""Reader for the solver's CSV artifact format.

Format contract: optional '#'-prefixed ``key = value`` metadata lines,
one comma-separated header row, then numeric rows. Deliberately
reimplemented here so this package has no dependency on the solver.
"""

from __future__ import annotations

import numpy as np

__all__ = ["read_csv", "require_columns"]


def read_csv(path) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    """Return (columns, metadata); metadata values stay strings."""
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
    try:
        data = np.asarray(rows, dtype=float) if rows else np.empty((0, len(header)))
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric data row") from exc
    if rows and data.shape[1] != len(header):
        raise ValueError(f"{path}: row width does not match header")
    return {name: data[:, i] for i, name in enumerate(header)}, metadata


def require_columns(columns: dict, names, path) -> None:
    missing = [n for n in names if n not in columns]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}, found {list(columns)}")
