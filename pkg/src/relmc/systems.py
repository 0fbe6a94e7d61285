"""Particle solvers for n-component relaxation systems.

Three steppers: the weighted Monte Carlo on a shared grid (signed masses,
per-cell mass units), the grid-free gradient-based solver in characteristic
form (one derivative ensemble per Riemann-invariant family), and the
mesh-dependent gradient solver for systems without a characteristic form
(derivatives reconstructed per cell, solution still read per particle from
the CDFs).

Every stepper processes families in order with the shared kernels, so an
n=1 system run with a matched seed reproduces the corresponding scalar run
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, SubcharacteristicViolation
from .kernels import relax_velocities, weighted_cell_relax, weighted_lowvar_cell_relax
from .models import CharacteristicModel, RelaxationConfig, SystemModel
from .particles import ParticleEnsemble, _sample_from_weights, make_rng, transport
from .reconstruct import Grid, batch_cdf, histogram
from .results import RunResult, snapshot_schedule

__all__ = [
    "SystemState",
    "mc_systems_step",
    "gbmc_characteristic_step",
    "gbmc_meshed_step",
    "physical_fields",
    "run_mc_systems",
    "run_gbmc_characteristic",
    "run_gbmc_meshed",
]


@dataclass
class SystemState:
    ensembles: list[ParticleEnsemble]
    model: SystemModel | CharacteristicModel
    config: RelaxationConfig
    grid: Grid | None = None
    t: float = 0.0
    #: per-family (left, right) boundary values of the represented field
    anchors: list[tuple[float, float]] | None = None
    mode: str = "blended"
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_families(self) -> int:
        return len(self.ensembles)

    def _tally(self, key, amount=1):
        self.diagnostics[key] = self.diagnostics.get(key, 0) + amount


# ---------------------------------------------------------------------------
# weighted Monte Carlo on a grid

def mc_systems_step(
    state: SystemState, rng: np.random.Generator, lowvar: bool = False
) -> SystemState:
    """Transport all families, reconstruct the full state on the shared
    grid, then relax each family with the signed-mass cell kernel.

    With ``lowvar`` the per-cell branch counts are fixed by stochastic
    rounding instead of independent per-particle draws, which removes the
    branch-split noise injected each step wherever E+ and E- have opposite
    signs."""
    if state.grid is None:
        raise ConfigError("weighted MC for systems requires a grid")
    dt = state.config.dt
    for ens in state.ensembles:
        transport(ens, dt)
    u = np.stack(
        [histogram(ens, state.grid, tally=state.diagnostics).values for ens in state.ensembles]
    )
    flux = np.asarray(state.model.flux(u))
    p_int = state.config.interaction_probability
    kernel = weighted_lowvar_cell_relax if lowvar else weighted_cell_relax
    for h, ens in enumerate(state.ensembles):
        a_h = state.config.speeds[h]
        eplus = (a_h * u[h] + flux[h]) / (2.0 * a_h)
        eminus = u[h] - eplus
        diag = kernel(rng, ens, state.grid, eplus, eminus, p_int)
        state._tally("degenerate_cells_skipped", diag["skipped_cells"])
    state.t += dt
    return state


# ---------------------------------------------------------------------------
# grid-free characteristic-form GBMC

def _invariant_values(state: SystemState, queries: np.ndarray) -> list[np.ndarray]:
    anchors = state.anchors or [(0.0, None)] * state.n_families
    return [
        batch_cdf(ens, queries, mode=state.mode, u_left=lo, u_right=hi)
        for ens, (lo, hi) in zip(state.ensembles, anchors)
    ]


def gbmc_characteristic_step(state: SystemState, rng: np.random.Generator) -> SystemState:
    """Transport each invariant family at +-a_h, evaluate all invariants at
    its particle positions through their empirical CDFs, and redraw
    velocities from (a_h +- lambda_h)/(2 a_h).  Masses never change and no
    grid is read."""
    model = state.model
    if not isinstance(model, CharacteristicModel):
        raise ConfigError("characteristic-form GBMC needs a CharacteristicModel")
    dt = state.config.dt
    for ens in state.ensembles:
        transport(ens, dt)
    p_int = state.config.interaction_probability
    for h, ens in enumerate(state.ensembles):
        a = state.config.speeds[h]
        gammas = _invariant_values(state, ens.x)
        lam = np.asarray(model.char_speeds(*gammas)[h], dtype=float)
        lam_max = float(np.max(np.abs(lam))) if lam.size else 0.0
        if lam_max >= 1.25 * a:
            # far outside what reconstruction noise can explain
            raise SubcharacteristicViolation(
                f"|lambda_{h + 1}| = {lam_max} >= 1.25 a_{h + 1} = {1.25 * a}"
            )
        p_plus = (a + lam) / (2.0 * a)
        clamped = int(np.count_nonzero((p_plus < 0.0) | (p_plus > 1.0)))
        if clamped:
            # noisy CDF estimates can push lambda slightly past a; saturate
            state._tally("probability_clamps", clamped)
            p_plus = np.clip(p_plus, 0.0, 1.0)
        ens.v = relax_velocities(rng, ens.v, a, p_plus, p_int)
    state.t += dt
    return state


def physical_fields(state: SystemState, queries) -> np.ndarray:
    """Invariant CDFs at the queries mapped back to physical variables.

    Reconstruction noise can push depth/density slightly negative; such
    values are clamped to zero and counted in the diagnostics.
    """
    model = state.model
    if not isinstance(model, CharacteristicModel):
        raise ConfigError("physical_fields needs a CharacteristicModel")
    q = np.asarray(queries, dtype=float)
    gammas = _invariant_values(state, q)
    phys = [np.asarray(c, dtype=float) for c in model.from_invariants(*gammas)]
    if model.base in ("swe", "aw-rascle"):
        neg = int(np.count_nonzero(phys[0] < 0))
        if neg:
            state._tally("clamped_states", neg)
            phys[0] = np.maximum(phys[0], 0.0)
    return np.stack(phys)


# ---------------------------------------------------------------------------
# mesh-dependent GBMC

def gbmc_meshed_step(state: SystemState, rng: np.random.Generator) -> SystemState:
    """Gradient solver without a characteristic form: derivatives are
    reconstructed per cell, the solution stays particle-dependent, and the
    signed-mass balance reassigns per-cell mass units from the derivative
    equilibria."""
    model = state.model
    if not isinstance(model, SystemModel):
        raise ConfigError("mesh-dependent GBMC needs a SystemModel")
    if state.grid is None:
        raise ConfigError("mesh-dependent GBMC requires a grid")
    grid = state.grid
    dt = state.config.dt
    for ens in state.ensembles:
        transport(ens, dt)

    w = np.stack(
        [histogram(ens, grid, tally=state.diagnostics).values for ens in state.ensembles]
    )
    centers = grid.centers()
    u_centers = np.stack(_invariant_values(state, centers))
    jac_c = np.asarray(model.jacobian(u_centers))  # (n, n, M)
    jw_c = np.einsum("hkM,kM->hM", jac_c, w)
    p_int = state.config.interaction_probability

    for h, ens in enumerate(state.ensembles):
        a = state.config.speeds[h]
        dplus_c = (a * w[h] + jw_c[h]) / (2.0 * a)
        dminus_c = w[h] - dplus_c
        denom_c = np.abs(dplus_c) + np.abs(dminus_c)

        idx, inside = grid.cell_of(ens.x)
        counts = np.bincount(idx[inside], minlength=grid.m)
        valid = (counts > 0) & (denom_c > 0.0)
        m_tilde = np.zeros(grid.m)
        m_tilde[valid] = denom_c[valid] * ens.n_sample * grid.dx / counts[valid]
        m_plus = np.where(dplus_c > 0.0, m_tilde, -m_tilde)
        m_minus = np.where(dminus_c > 0.0, m_tilde, -m_tilde)

        # particle-dependent probabilities: u from the CDFs, w from the cell
        u_part = np.stack(_invariant_values(state, ens.x))
        jac_p = np.asarray(model.jacobian(u_part))  # (n, n, N_h)
        jw_p = np.einsum("hkN,kN->N", jac_p[h][None, :, :], w[:, idx])
        w_h_cell = w[h][idx]
        dplus = (a * w_h_cell + jw_p) / (2.0 * a)
        dminus = w_h_cell - dplus
        denom = np.abs(dplus) + np.abs(dminus)
        p_plus = np.where(denom > 0.0, np.abs(dplus) / np.where(denom > 0, denom, 1.0), 0.0)

        gate = rng.random(ens.n)
        pick = rng.random(ens.n)
        act = inside & valid[idx] & (denom > 0.0) & (gate < p_int)
        up = pick < p_plus
        ens.v[act] = np.where(up, a, -a)[act]
        ens.m[act] = np.where(up, m_plus[idx], m_minus[idx])[act]
        state._tally(
            "degenerate_cells_skipped",
            int(np.count_nonzero((counts > 0) & ~valid)),
        )
    state.t += dt
    return state


# ---------------------------------------------------------------------------
# initial sampling (per family, RNG order mirrors the scalar samplers)

def _sample_family_mc(
    vals: np.ndarray,
    flux_vals: np.ndarray,
    edges: np.ndarray,
    h: int,
    n: int,
    a: float,
    rng: np.random.Generator,
) -> ParticleEnsemble:
    weights = np.abs(vals[h]) * np.diff(edges)
    norm1 = float(weights.sum())
    if norm1 == 0.0:
        # identically zero component: uniform zero-mass carriers that pick
        # up mass from the cell balance as the dynamics couple
        x = edges[0] + rng.random(n) * (edges[-1] - edges[0])
        v = np.where(rng.random(n) < 0.5, a, -a)
        return ParticleEnsemble(x, v, np.zeros(n), a, n)
    x, idx = _sample_from_weights(edges, weights, n, rng)
    masses = np.sign(vals[h, idx]) * norm1
    eplus = (a * vals[h, idx] + flux_vals[h, idx]) / (2.0 * a)
    eminus = vals[h, idx] - eplus
    denom = np.abs(eplus) + np.abs(eminus)
    pplus = np.abs(eplus) / np.where(denom > 0, denom, 1.0)
    v = np.where(rng.random(n) < pplus, a, -a)
    return ParticleEnsemble(x, v, masses, a, n)


def _sample_family_gbmc(
    gamma_tab: np.ndarray,
    edges: np.ndarray,
    speeds_of: Callable,
    h: int,
    n: int,
    a: float,
    rng: np.random.Generator,
) -> ParticleEnsemble:
    inc = np.diff(gamma_tab[h])
    weights = np.abs(inc)
    tv = float(weights.sum())
    if tv == 0.0:
        x = edges[0] + rng.random(n) * (edges[-1] - edges[0])
        v = np.where(rng.random(n) < 0.5, a, -a)
        return ParticleEnsemble(x, v, np.zeros(n), a, n)
    x, idx = _sample_from_weights(edges, weights, n, rng)
    masses = np.sign(inc[idx]) * tv
    lam = np.asarray(speeds_of(idx), dtype=float)
    pplus = (a + lam) / (2.0 * a)
    v = np.where(rng.random(n) < pplus, a, -a)
    return ParticleEnsemble(x, v, masses, a, n)


# ---------------------------------------------------------------------------
# run drivers

def _check_speeds(config: RelaxationConfig, n: int):
    if len(config.speeds) != n:
        raise ConfigError(f"need {n} relaxation speeds, got {len(config.speeds)}")


def run_mc_systems(
    model: SystemModel,
    u0: Callable[[np.ndarray], np.ndarray],
    domain: tuple[float, float],
    grid: Grid,
    config: RelaxationConfig,
    n: int,
    t_final: float,
    seed: int,
    snapshot_times=None,
    table_size: int = 100_000,
    pad: float | None = None,
    lowvar: bool = False,
    rng: np.random.Generator | None = None,
) -> RunResult:
    """Weighted MC run; ``u0`` maps positions to stacked conserved
    components of shape (n_components, len(x)).  The working grid and
    sampling window are padded by ``pad`` (default max(a_h) * t_final) so
    outflowing mass keeps participating; snapshots cover ``grid`` only."""
    _check_speeds(config, model.n)
    rng = make_rng(seed) if rng is None else rng
    if pad is None:
        pad = max(config.speeds) * t_final
    work_grid, inner = grid.padded(pad)
    edges = np.linspace(work_grid.x_min, work_grid.x_max, table_size + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    vals = np.asarray(u0(mid), dtype=float)
    flux_vals = np.asarray(model.flux(vals), dtype=float)
    ensembles = [
        _sample_family_mc(vals, flux_vals, edges, h, n, config.speeds[h], rng)
        for h in range(model.n)
    ]
    state = SystemState(ensembles, model, config, grid=work_grid)
    schedule = snapshot_schedule(t_final, config.dt, snapshot_times)
    n_steps = int(round(t_final / config.dt)) if t_final > 0 else 0

    def snap():
        return np.stack(
            [histogram(e, work_grid).values[inner] for e in state.ensembles]
        )

    snaps: dict[float, np.ndarray] = {}
    if 0 in schedule:
        snaps[0.0] = snap()
    for k in range(1, n_steps + 1):
        mc_systems_step(state, rng, lowvar=lowvar)
        if k in schedule:
            snaps[k * config.dt] = snap()
    return RunResult(
        x=grid.centers(),
        snapshots=snaps,
        t_final=n_steps * config.dt,
        diagnostics=state.diagnostics,
        params={
            "method": "mc-systems-lowvar" if lowvar else "mc-systems",
            "model": model.name,
            "n": n,
            "m_cells": grid.m,
            "dt": config.dt,
            "epsilon": config.epsilon,
            "speeds": list(config.speeds),
            "seed": seed,
        },
    )


def run_gbmc_characteristic(
    model: CharacteristicModel,
    primitives0: Callable[[np.ndarray], Sequence[np.ndarray]],
    domain: tuple[float, float],
    config: RelaxationConfig,
    n: int,
    t_final: float,
    seed: int,
    output_points=None,
    snapshot_times=None,
    mode: str = "blended",
    table_size: int = 100_000,
    rng: np.random.Generator | None = None,
) -> RunResult:
    """Grid-free GBMC run in Riemann invariants; snapshots are physical
    fields on the output points.  ``primitives0`` maps positions to the
    primitive variables expected by ``model.to_invariants``."""
    _check_speeds(config, model.n)
    rng = make_rng(seed) if rng is None else rng
    edges = np.linspace(domain[0], domain[1], table_size + 1)
    gamma_tab = np.stack(
        [np.asarray(g, dtype=float) for g in model.to_invariants(*primitives0(edges))]
    )

    def speeds_at(h):
        def fn(idx):
            return np.asarray(model.char_speeds(*(gamma_tab[:, idx])), dtype=float)[h]
        return fn

    ensembles = [
        _sample_family_gbmc(gamma_tab, edges, speeds_at(h), h, n, config.speeds[h], rng)
        for h in range(model.n)
    ]
    anchors = [(float(gamma_tab[h, 0]), float(gamma_tab[h, -1])) for h in range(model.n)]
    state = SystemState(ensembles, model, config, anchors=anchors, mode=mode)
    if output_points is None:
        output_points = np.linspace(domain[0], domain[1], 1000)
    output_points = np.asarray(output_points, dtype=float)

    schedule = snapshot_schedule(t_final, config.dt, snapshot_times)
    n_steps = int(round(t_final / config.dt)) if t_final > 0 else 0
    snaps: dict[float, np.ndarray] = {}
    if 0 in schedule:
        snaps[0.0] = physical_fields(state, output_points)
    mass_trace = [[e.total_mass() for e in state.ensembles]]
    for k in range(1, n_steps + 1):
        gbmc_characteristic_step(state, rng)
        mass_trace.append([e.total_mass() for e in state.ensembles])
        if k in schedule:
            snaps[k * config.dt] = physical_fields(state, output_points)
    state.diagnostics["family_mass"] = np.asarray(mass_trace).T
    return RunResult(
        x=output_points,
        snapshots=snaps,
        t_final=n_steps * config.dt,
        diagnostics=state.diagnostics,
        params={
            "method": "gbmc-char",
            "model": model.name,
            "n": n,
            "dt": config.dt,
            "epsilon": config.epsilon,
            "speeds": list(config.speeds),
            "seed": seed,
            "mode": mode,
        },
    )


def run_gbmc_meshed(
    model: SystemModel,
    u0: Callable[[np.ndarray], np.ndarray],
    domain: tuple[float, float],
    grid: Grid,
    config: RelaxationConfig,
    n: int,
    t_final: float,
    seed: int,
    output_points=None,
    snapshot_times=None,
    mode: str = "blended",
    table_size: int = 100_000,
    pad: float | None = None,
    rng: np.random.Generator | None = None,
) -> RunResult:
    """Mesh-dependent GBMC run on conserved components; snapshots are the
    component CDF reconstructions on the output points.  The derivative
    reconstruction grid is padded by ``pad`` (default max(a_h) * t_final)
    so particles drifting past the window keep relaxing."""
    _check_speeds(config, model.n)
    rng = make_rng(seed) if rng is None else rng
    if pad is None:
        pad = max(config.speeds) * t_final
    grid, _ = grid.padded(pad)
    edges = np.linspace(domain[0], domain[1], table_size + 1)
    comp_tab = np.asarray(u0(edges), dtype=float)

    ensembles = []
    for h in range(model.n):
        ensembles.append(
            _sample_family_gbmc(
                comp_tab, edges, lambda idx, h=h: np.zeros(np.size(idx)), h, n,
                config.speeds[h], rng,
            )
        )
    anchors = [(float(comp_tab[h, 0]), float(comp_tab[h, -1])) for h in range(model.n)]
    state = SystemState(ensembles, model, config, grid=grid, anchors=anchors, mode=mode)
    if output_points is None:
        output_points = np.linspace(domain[0], domain[1], 1000)
    output_points = np.asarray(output_points, dtype=float)

    schedule = snapshot_schedule(t_final, config.dt, snapshot_times)
    n_steps = int(round(t_final / config.dt)) if t_final > 0 else 0

    def snap():
        return np.stack(_invariant_values(state, output_points))

    snaps: dict[float, np.ndarray] = {}
    if 0 in schedule:
        snaps[0.0] = snap()
    for k in range(1, n_steps + 1):
        gbmc_meshed_step(state, rng)
        if k in schedule:
            snaps[k * config.dt] = snap()
    return RunResult(
        x=output_points,
        snapshots=snaps,
        t_final=n_steps * config.dt,
        diagnostics=state.diagnostics,
        params={
            "method": "gbmc-meshed",
            "model": model.name,
            "n": n,
            "m_cells": grid.m,
            "dt": config.dt,
            "epsilon": config.epsilon,
            "speeds": list(config.speeds),
            "seed": seed,
            "mode": mode,
        },
    )
