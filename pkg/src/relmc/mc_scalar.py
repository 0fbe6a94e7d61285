"""Direct Monte Carlo solvers for the scalar relaxation system.

Three variants of the relaxation step are available: the baseline
per-particle redraw (nonnegative solutions only), its low-variance version
with stochastically rounded per-cell counts, and the signed-mass weighted
scheme for solutions of arbitrary sign (fixed particle count with per-cell
masses, or fixed mass with a variable count).  All work uniformly in the
relaxation rate; the zero-relaxation limit sets the interaction
probability to one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NegativeEquilibrium
from .kernels import (
    lowvar_cell_relax,
    relax_velocities,
    weighted_cell_relax,
    weighted_lowvar_cell_relax,
)
from .models import FluxModel, RelaxationConfig, equilibrium_split
from .particles import (
    ParticleEnsemble,
    make_rng,
    sample_mc_initial,
    stochastic_round,
    transport,
)
from .reconstruct import FieldOnGrid, Grid, histogram
from .results import RunResult, snapshot_schedule

__all__ = [
    "McState",
    "mc_step",
    "mc_step_lowvar",
    "mc_step_weighted",
    "run_mc",
]


@dataclass
class McState:
    ensemble: ParticleEnsemble
    grid: Grid
    config: RelaxationConfig
    model: FluxModel
    t: float = 0.0
    #: fixed particle mass magnitude, used by the variable-count strategy
    mass_unit: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    def _tally(self, key, amount=1):
        self.diagnostics[key] = self.diagnostics.get(key, 0) + amount


def _cell_equilibria(state: McState):
    field_u = histogram(state.ensemble, state.grid, tally=state.diagnostics)
    u = field_u.values
    eplus, eminus = equilibrium_split(state.model, u, state.config.a)
    return u, eplus, eminus


def mc_step(state: McState, rng: np.random.Generator) -> McState:
    """Transport + baseline relaxation for nonnegative solutions."""
    ens = state.ensemble
    transport(ens, state.config.dt)
    u, eplus, eminus = _cell_equilibria(state)

    idx, inside = state.grid.cell_of(ens.x)
    counts = np.bincount(idx[inside], minlength=state.grid.m)
    occupied = counts > 0
    if np.any(occupied & ((eplus < 0) | (eminus < 0))):
        raise NegativeEquilibrium(
            "E+-(u_j) < 0 in an occupied cell; use the weighted variant"
        )
    nonzero = occupied & (u > 0)
    state._tally("empty_cells_skipped", int(np.count_nonzero(occupied & ~nonzero)))
    p_plus_cell = np.where(nonzero, eplus / np.where(u > 0, u, 1.0), 0.0)
    active = inside & nonzero[idx]
    ens.v = relax_velocities(
        rng, ens.v, ens.a, p_plus_cell[idx], state.config.interaction_probability, active
    )
    state.t += state.config.dt
    return state


def mc_step_lowvar(state: McState, rng: np.random.Generator) -> McState:
    """Transport + low-variance relaxation (per-cell counts fixed by
    stochastic rounding, velocities assigned over a random permutation)."""
    ens = state.ensemble
    transport(ens, state.config.dt)
    u, eplus, eminus = _cell_equilibria(state)

    idx, inside = state.grid.cell_of(ens.x)
    counts = np.bincount(idx[inside], minlength=state.grid.m)
    occupied = counts > 0
    if np.any(occupied & ((eplus < 0) | (eminus < 0))):
        raise NegativeEquilibrium(
            "E+-(u_j) < 0 in an occupied cell; use the weighted variant"
        )
    nonzero = u > 0
    state._tally("empty_cells_skipped", int(np.count_nonzero(occupied & ~nonzero)))
    p_plus_cell = np.where(nonzero, eplus / np.where(nonzero, u, 1.0), 0.0)
    # zero-solution cells keep their velocities: exclude them by zeroing the
    # per-cell interacting count via a masked copy of the probabilities
    diag = lowvar_cell_relax(
        rng,
        _masked_view(ens, state.grid, nonzero),
        state.grid,
        p_plus_cell,
        state.config.interaction_probability,
    )
    state._tally("outside", diag["outside"])
    state.t += state.config.dt
    return state


class _masked_view:
    """Ensemble proxy hiding particles whose cell is masked out, so the
    low-variance kernel leaves them untouched."""

    def __init__(self, ens: ParticleEnsemble, grid: Grid, cell_mask: np.ndarray):
        idx, inside = grid.cell_of(ens.x)
        keep = inside & cell_mask[idx]
        self.x = np.where(keep, ens.x, np.inf)  # pushed outside the window
        self.v = ens.v
        self.m = ens.m
        self.a = ens.a
        self.n = ens.n
        self.n_sample = ens.n_sample


def mc_step_weighted(
    state: McState, rng: np.random.Generator, strategy: str = "fixed-count"
) -> McState:
    """Transport + signed-mass relaxation.

    ``fixed-count`` keeps the per-cell particle count and reassigns the
    cell mass unit from the equilibrium balance; ``fixed-mass`` keeps the
    particle mass magnitude fixed and adjusts per-cell counts by killing
    and replicating particles.
    """
    ens = state.ensemble
    transport(ens, state.config.dt)
    u, eplus, eminus = _cell_equilibria(state)

    if strategy == "fixed-count":
        diag = weighted_cell_relax(
            rng, ens, state.grid, eplus, eminus, state.config.interaction_probability
        )
        state._tally("degenerate_cells_skipped", diag["skipped_cells"])
    elif strategy == "fixed-count-lowvar":
        diag = weighted_lowvar_cell_relax(
            rng, ens, state.grid, eplus, eminus, state.config.interaction_probability
        )
        state._tally("degenerate_cells_skipped", diag["skipped_cells"])
    elif strategy == "fixed-mass":
        _fixed_mass_relax(state, rng, eplus, eminus)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    state.t += state.config.dt
    return state


def _fixed_mass_relax(state: McState, rng, eplus, eminus):
    """Variable-count strategy: per-cell target counts from the mass
    balance N~+- = SRound(|E+-| N dx / m), reached by discarding particles
    uniformly at random or replicating at uniform positions in the cell."""
    ens = state.ensemble
    grid = state.grid
    m_unit = state.mass_unit
    if m_unit <= 0:
        raise ValueError("fixed-mass strategy requires a positive mass_unit")
    p_int = state.config.interaction_probability
    idx, inside = grid.cell_of(ens.x)
    counts = np.bincount(idx[inside], minlength=grid.m)
    denom = np.abs(eplus) + np.abs(eminus)

    keep_x, keep_v, keep_m = [ens.x[~inside]], [ens.v[~inside]], [ens.m[~inside]]
    order = np.argsort(idx[inside], kind="stable")
    members_all = np.nonzero(inside)[0][order]
    starts = np.concatenate([[0], np.cumsum(counts)])
    for j in np.nonzero(counts)[0]:
        cell = members_all[starts[j]:starts[j + 1]]
        if denom[j] == 0.0:
            state._tally("degenerate_cells_skipped")
            keep_x.append(ens.x[cell]); keep_v.append(ens.v[cell]); keep_m.append(ens.m[cell])
            continue
        gate = rng.random(cell.size) < p_int
        frozen = cell[~gate]
        keep_x.append(ens.x[frozen]); keep_v.append(ens.v[frozen]); keep_m.append(ens.m[frozen])
        n_act = int(np.count_nonzero(gate))
        if n_act == 0:
            continue
        scale = ens.n_sample * grid.dx / m_unit
        n_plus = stochastic_round(np.abs(eplus[j]) * scale * (n_act / counts[j]), rng)
        n_minus = stochastic_round(np.abs(eminus[j]) * scale * (n_act / counts[j]), rng)
        total = n_plus + n_minus
        pos = ens.x[cell[gate]]
        if total <= n_act:
            pos = rng.permutation(pos)[:total]
        else:
            extra = grid.x_min + (j + rng.random(total - n_act)) * grid.dx
            pos = np.concatenate([rng.permutation(pos), extra])
        keep_x.append(pos)
        keep_v.append(np.concatenate([np.full(n_plus, ens.a), np.full(n_minus, -ens.a)]))
        keep_m.append(
            np.concatenate(
                [
                    np.full(n_plus, np.sign(eplus[j]) * m_unit if eplus[j] != 0 else m_unit),
                    np.full(n_minus, np.sign(eminus[j]) * m_unit if eminus[j] != 0 else -m_unit),
                ]
            )
        )
    state.ensemble = ParticleEnsemble(
        np.concatenate(keep_x),
        np.concatenate(keep_v),
        np.concatenate(keep_m),
        ens.a,
        ens.n_sample,
    )


_VARIANTS: dict[str, Callable] = {
    "baseline": mc_step,
    "lowvar": mc_step_lowvar,
    "weighted": lambda s, r: mc_step_weighted(s, r, "fixed-count"),
    "weighted-lowvar": lambda s, r: mc_step_weighted(s, r, "fixed-count-lowvar"),
    "weighted-variable-count": lambda s, r: mc_step_weighted(s, r, "fixed-mass"),
}


def run_mc(
    model: FluxModel,
    u0: Callable,
    domain: tuple[float, float],
    grid: Grid,
    config: RelaxationConfig,
    n: int,
    t_final: float,
    seed: int,
    variant: str = "baseline",
    snapshot_times=None,
    v0: Callable | None = None,
    pad: float | None = None,
    rng: np.random.Generator | None = None,
) -> RunResult:
    """Time loop: sample, step, snapshot grid reconstructions.

    The working grid and sampling window are padded by ``pad`` (default
    a * t_final, the maximal particle excursion) so mass leaving the
    reporting window still participates; snapshots cover ``grid`` only.
    """
    if variant not in _VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {sorted(_VARIANTS)}")
    step = _VARIANTS[variant]
    rng = make_rng(seed) if rng is None else rng
    if pad is None:
        pad = config.a * t_final
    work_grid, inner = grid.padded(pad)
    work_domain = (work_grid.x_min, work_grid.x_max)
    ens = sample_mc_initial(u0, work_domain, n, model, config.a, rng, v0=v0)
    state = McState(ens, work_grid, config, model, mass_unit=float(np.abs(ens.m).max()))
    schedule = snapshot_schedule(t_final, config.dt, snapshot_times)
    n_steps = int(round(t_final / config.dt)) if t_final > 0 else 0

    snaps: dict[float, np.ndarray] = {}
    mass_trace = [state.ensemble.total_mass()]
    if 0 in schedule:
        snaps[0.0] = histogram(state.ensemble, work_grid).values[None, inner]
    for k in range(1, n_steps + 1):
        step(state, rng)
        mass_trace.append(state.ensemble.total_mass())
        if k in schedule:
            snaps[k * config.dt] = histogram(state.ensemble, work_grid).values[None, inner]
    state.diagnostics["mass_trace"] = np.asarray(mass_trace)
    return RunResult(
        x=grid.centers(),
        snapshots=snaps,
        t_final=n_steps * config.dt,
        diagnostics=state.diagnostics,
        params={
            "method": f"mc-{variant}",
            "model": model.name,
            "n": n,
            "m_cells": grid.m,
            "dt": config.dt,
            "epsilon": config.epsilon,
            "a": config.a,
            "seed": seed,
        },
    )
