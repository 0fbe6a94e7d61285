"""Prebuilt convergence-study harnesses for scalar problems.

Wires the three standard method tracks (fixed-mesh MC, optimal-mesh MC
with dx proportional to N^(-1/3), and the grid-free gradient solver) to a
fine Godunov reference and hands them to the generic convergence driver.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .analysis import ErrorReport, convergence_study, optimal_dx
from .gbmc_scalar import run_gbmc
from .mc_scalar import run_mc
from .models import FluxModel, RelaxationConfig
from .reconstruct import Grid
from .reference import godunov_scalar

__all__ = ["scalar_error_study"]


def scalar_error_study(
    model: FluxModel,
    u0,
    domain: tuple[float, float],
    a: float,
    dt: float,
    t_final: float,
    ns: Sequence[int],
    methods: Sequence[str] = ("mc", "mc_opt", "gbmc"),
    runs: int = 5,
    m_fixed: int = 100,
    c1: float = 1.0,
    norm_u: float = 1.0,
    m_ref: int = 2000,
    eval_points: int = 1000,
    p: float = 2.0,
    seed: int = 0,
    mc_variant: str = "baseline",
    workers: int = 1,
) -> ErrorReport:
    """Relative L^p error versus particle count for the requested tracks.

    The reference is a fine first-order Godunov solution, linearly
    interpolated to wherever each track reports its field.  The gradient
    track is evaluated on ``eval_points`` uniform locations; the MC tracks
    on their own cell centers (fixed mesh, or the per-N optimal mesh built
    from the bias coefficient estimate ``c1``).
    """
    ref = godunov_scalar(model, u0, domain, m_ref, t_final)
    ref_x = ref.x
    ref_u = ref.final[0]

    def reference(x):
        return np.interp(x, ref_x, ref_u)

    config = RelaxationConfig(speeds=(a,), dt=dt)
    length = domain[1] - domain[0]
    eval_x = np.linspace(domain[0], domain[1], eval_points)

    def gbmc_runner(n, s):
        res = run_gbmc(model, u0, domain, config, n, t_final, s,
                       output_points=eval_x)
        return res.x, res.final[0]

    def mc_runner_for(m_cells):
        grid = Grid(domain[0], domain[1], m_cells)

        def runner(n, s):
            res = run_mc(model, u0, domain, grid, config, n, t_final, s,
                         variant=mc_variant)
            return res.x, res.final[0]
        return runner

    runners = {}
    for method in methods:
        if method == "gbmc":
            runners[method] = gbmc_runner
        elif method == "mc":
            runners[method] = mc_runner_for(m_fixed)
        elif method == "mc_opt":
            fixed_runner_cache = {}

            def mc_opt_runner(n, s, _cache=fixed_runner_cache):
                m_n = max(int(round(length / optimal_dx(n, c1, norm_u))), 4)
                if m_n not in _cache:
                    _cache[m_n] = mc_runner_for(m_n)
                return _cache[m_n](n, s)

            runners[method] = mc_opt_runner
        else:
            raise ValueError(f"unknown study method {method!r}")

    return convergence_study(
        runners, ns, reference, runs=runs, p=p, seed=seed, workers=workers
    )
