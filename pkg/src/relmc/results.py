"""Run results: solution snapshots plus diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["RunResult", "snapshot_schedule"]


@dataclass
class RunResult:
    """Output of a particle or finite-volume run.

    ``snapshots`` maps snapshot time -> array of shape (n_components,
    n_points) evaluated on ``x`` (grid centers or output points).
    """

    x: np.ndarray
    snapshots: dict[float, np.ndarray]
    t_final: float
    diagnostics: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.snapshots[max(self.snapshots)]


def snapshot_schedule(t_final: float, dt: float, snapshot_times) -> set[int]:
    """Map requested snapshot times to step indices (dt must divide them
    within half a step)."""
    n_steps = int(round(t_final / dt)) if t_final > 0 else 0
    if snapshot_times is None:
        return {n_steps}
    out = set()
    for t in snapshot_times:
        k = int(round(t / dt))
        if abs(k * dt - t) > 0.5 * dt or k > n_steps:
            raise ValueError(f"snapshot time {t} is not a multiple of dt within the run")
        out.add(k)
    out.add(n_steps)
    return out
