"""Shared stochastic relaxation kernels.

Scalar and system solvers call the same kernels so that an n=1 system run
with a matched seed consumes random numbers in exactly the same order as
the corresponding scalar run and reproduces it bit for bit.
"""

from __future__ import annotations

import numpy as np

from .particles import ParticleEnsemble, stochastic_round
from .reconstruct import Grid

__all__ = [
    "relax_velocities",
    "weighted_cell_relax",
    "lowvar_cell_relax",
]


def relax_velocities(
    rng: np.random.Generator,
    v: np.ndarray,
    a: float,
    p_plus: np.ndarray,
    p_interact,
    active: np.ndarray | None = None,
) -> np.ndarray:
    """Per-particle velocity redraw: with probability ``p_interact`` a
    particle picks +a with probability ``p_plus``, otherwise keeps v.

    Both uniform arrays are always drawn so RNG consumption does not depend
    on the interaction outcome.  ``active`` masks particles excluded from
    relaxation (outside the window, degenerate cell, ...).
    """
    gate = rng.random(v.size)
    pick = rng.random(v.size)
    interact = gate < p_interact
    if active is not None:
        interact &= active
    return np.where(interact, np.where(pick < p_plus, a, -a), v)


def weighted_cell_relax(
    rng: np.random.Generator,
    ens: ParticleEnsemble,
    grid: Grid,
    eplus: np.ndarray,
    eminus: np.ndarray,
    p_interact: float,
) -> dict:
    """Signed-mass relaxation with fixed per-cell particle count.

    Velocities are redrawn from p+- = |E+-|/(|E+|+|E-|) and each
    interacting particle receives the cell mass unit with the sign of the
    equilibrium branch it lands on; the mass unit satisfies
    m_j N_j = (|E+_j| + |E-_j|) N dx.  Cells with no particles or zero
    equilibrium magnitude are skipped.
    """
    idx, inside = grid.cell_of(ens.x)
    counts = np.bincount(idx[inside], minlength=grid.m)
    denom = np.abs(eplus) + np.abs(eminus)
    valid = (counts > 0) & (denom > 0.0)

    m_tilde = np.zeros(grid.m)
    m_tilde[valid] = denom[valid] * ens.n_sample * grid.dx / counts[valid]
    safe = np.where(denom > 0.0, denom, 1.0)
    p_plus_cell = np.abs(eplus) / safe
    m_plus = np.where(eplus > 0.0, m_tilde, -m_tilde)
    m_minus = np.where(eminus > 0.0, m_tilde, -m_tilde)

    gate = rng.random(ens.n)
    pick = rng.random(ens.n)
    act = inside & valid[idx] & (gate < p_interact)
    up = pick < p_plus_cell[idx]
    ens.v[act] = np.where(up, ens.a, -ens.a)[act]
    ens.m[act] = np.where(up, m_plus[idx], m_minus[idx])[act]
    return {
        "skipped_cells": int(np.count_nonzero(counts > 0) - np.count_nonzero(valid & (counts > 0))),
        "outside": int(np.count_nonzero(~inside)),
    }


def weighted_lowvar_cell_relax(
    rng: np.random.Generator,
    ens: ParticleEnsemble,
    grid: Grid,
    eplus: np.ndarray,
    eminus: np.ndarray,
    p_interact: float,
) -> dict:
    """Signed-mass relaxation with variance-reduced branch assignment.

    Same mass balance as weighted_cell_relax, but the per-cell counts of
    interacting particles and of the +a branch are fixed by stochastic
    rounding and dealt out over a random permutation, removing the
    binomial branch-split noise from the cell mass."""
    idx, inside = grid.cell_of(ens.x)
    counts = np.bincount(idx[inside], minlength=grid.m)
    denom = np.abs(eplus) + np.abs(eminus)

    order = np.argsort(idx[inside], kind="stable")
    members_all = np.nonzero(inside)[0][order]
    starts = np.concatenate([[0], np.cumsum(counts)])
    skipped = 0
    for j in np.nonzero(counts)[0]:
        if denom[j] == 0.0:
            skipped += 1
            continue
        cell = members_all[starts[j]:starts[j + 1]]
        n_j = cell.size
        n_c = stochastic_round(p_interact * n_j, rng)
        if n_c == 0:
            continue
        p_plus = np.abs(eplus[j]) / denom[j]
        n_plus = stochastic_round(p_plus * n_c, rng)
        m_tilde = denom[j] * ens.n_sample * grid.dx / n_j
        m_plus = m_tilde if eplus[j] > 0.0 else -m_tilde
        m_minus = m_tilde if eminus[j] > 0.0 else -m_tilde
        perm = rng.permutation(cell)
        ens.v[perm[:n_plus]] = ens.a
        ens.m[perm[:n_plus]] = m_plus
        ens.v[perm[n_plus:n_c]] = -ens.a
        ens.m[perm[n_plus:n_c]] = m_minus
    return {"skipped_cells": skipped, "outside": int(np.count_nonzero(~inside))}


def lowvar_cell_relax(
    rng: np.random.Generator,
    ens: ParticleEnsemble,
    grid: Grid,
    p_plus_cell: np.ndarray,
    p_interact: float,
) -> dict:
    """Low-variance relaxation: per cell, the interacting count and the +a
    count are fixed by stochastic rounding and assigned to a random
    permutation of the cell's particles."""
    idx, inside = grid.cell_of(ens.x)
    order = np.argsort(idx[inside], kind="stable")
    members_all = np.nonzero(inside)[0][order]
    counts = np.bincount(idx[inside], minlength=grid.m)
    starts = np.concatenate([[0], np.cumsum(counts)])
    for j in np.nonzero(counts)[0]:
        cell = members_all[starts[j]:starts[j + 1]]
        n_j = cell.size
        n_c = stochastic_round(p_interact * n_j, rng)
        if n_c == 0:
            continue
        n_plus = stochastic_round(p_plus_cell[j] * n_c, rng)
        perm = rng.permutation(cell)
        ens.v[perm[:n_plus]] = ens.a
        ens.v[perm[n_plus:n_c]] = -ens.a
    return {"outside": int(np.count_nonzero(~inside))}
