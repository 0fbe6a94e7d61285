"""Deterministic reference solvers used to validate the particle methods.

A first-order Godunov scheme for scalar laws (exact cell-interface flux via
the min/max formulation, valid for any smooth flux), the relaxation
finite-volume scheme for systems (componentwise central flux with +-a_h
upwind dissipation), and the exact shallow-water Riemann solver (Newton on
the depth function, then self-similar sampling).
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import CflViolation, NonConvergence
from .models import FluxModel, RelaxationConfig, SystemModel
from .reconstruct import Grid
from .results import RunResult

__all__ = [
    "godunov_flux",
    "godunov_scalar",
    "relaxation_fv_system",
    "swe_exact_riemann",
]


def godunov_flux(model: FluxModel, ul: np.ndarray, ur: np.ndarray) -> np.ndarray:
    """Exact Riemann flux: min of F over [ul, ur] when ul <= ur, else max
    over [ur, ul].  The extremum is attained at an endpoint or at an
    interior critical point of F."""
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    cands = [model.flux(ul), model.flux(ur)]
    lo = np.minimum(ul, ur)
    hi = np.maximum(ul, ur)
    for s in model.sonic_points:
        inside = (lo < s) & (s < hi)
        fs = model.flux(np.full_like(ul, s))
        cands.append(np.where(inside, fs, cands[0]))
    stack = np.stack(cands)
    return np.where(ul <= ur, stack.min(axis=0), stack.max(axis=0))


def godunov_scalar(
    model: FluxModel,
    u0: Callable,
    domain: tuple[float, float],
    m: int,
    t_final: float,
    cfl: float = 0.9,
) -> RunResult:
    """First-order Godunov run with outflow boundaries and an adaptive
    time step dt = cfl dx / max|F'|."""
    grid = Grid(domain[0], domain[1], m)
    x = grid.centers()
    u = np.asarray(u0(x), dtype=float).copy()
    t = 0.0
    steps = 0
    while t < t_final - 1e-14:
        smax = model.max_char_speed(u)
        if smax <= 0:
            smax = 1e-14
        dt = min(cfl * grid.dx / smax, t_final - t)
        ue = np.concatenate([[u[0]], u, [u[-1]]])
        flux = godunov_flux(model, ue[:-1], ue[1:])
        u -= (dt / grid.dx) * (flux[1:] - flux[:-1])
        t += dt
        steps += 1
    return RunResult(
        x=x,
        snapshots={t_final: u[None, :]},
        t_final=t_final,
        diagnostics={"steps": steps},
        params={"method": "godunov", "model": model.name, "m_cells": m, "cfl": cfl},
    )


def relaxation_fv_system(
    model: SystemModel,
    u0: Callable,
    domain: tuple[float, float],
    m: int,
    config: RelaxationConfig,
    t_final: float,
) -> RunResult:
    """Deterministic relaxed scheme: componentwise interface flux
    (F_j + F_{j+1})/2 - (a_h/2)(u_{j+1} - u_j), outflow boundaries, fixed
    time step from the config.  Requires max(a_h) dt <= dx."""
    grid = Grid(domain[0], domain[1], m)
    x = grid.centers()
    u = np.asarray(u0(x), dtype=float).copy()
    if u.ndim == 1:
        u = u[None, :]
    speeds = np.asarray(config.speeds, dtype=float)[:, None]
    dt = config.dt
    if speeds.max() * dt > grid.dx * (1 + 1e-12):
        raise CflViolation(
            f"max(a) dt = {float(speeds.max()) * dt} exceeds dx = {grid.dx}"
        )
    n_steps = int(round(t_final / dt))
    for _ in range(n_steps):
        ue = np.concatenate([u[:, :1], u, u[:, -1:]], axis=1)
        fe = np.asarray(model.flux(ue))
        g = 0.5 * (fe[:, :-1] + fe[:, 1:]) - 0.5 * speeds * (ue[:, 1:] - ue[:, :-1])
        u = u - (dt / grid.dx) * (g[:, 1:] - g[:, :-1])
    return RunResult(
        x=x,
        snapshots={n_steps * dt: u},
        t_final=n_steps * dt,
        diagnostics={"steps": n_steps},
        params={
            "method": "relaxation-fv",
            "model": model.name,
            "m_cells": m,
            "dt": dt,
            "speeds": list(config.speeds),
        },
    )


def _depth_fn(h, h_k, c_k, g):
    """Toro depth function f_K and its derivative."""
    c = np.sqrt(g * h)
    if h <= h_k:
        f = 2.0 * (c - c_k)
        df = g / c
    else:
        ghalf = np.sqrt(0.5 * g * (h + h_k) / (h * h_k))
        f = (h - h_k) * ghalf
        df = ghalf - 0.25 * g * (h - h_k) / (ghalf * h * h)
    return f, df


def swe_exact_riemann(
    hl: float,
    ul: float,
    hr: float,
    ur: float,
    g: float = 9.8,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Exact wet-bed shallow-water Riemann solution.

    Returns a sampler mapping the similarity variable xi = x/t to
    (h, u) arrays.  Newton iteration on the depth function starts from the
    two-rarefaction guess.
    """
    cl = np.sqrt(g * hl)
    cr = np.sqrt(g * hr)
    if ur - ul >= 2.0 * (cl + cr):
        raise NonConvergence("initial states produce a dry intermediate region")

    hs = max(((0.5 * (cl + cr) + 0.25 * (ul - ur)) ** 2) / g, tol)
    for _ in range(max_iter):
        fl, dfl = _depth_fn(hs, hl, cl, g)
        fr, dfr = _depth_fn(hs, hr, cr, g)
        step = (fl + fr + ur - ul) / (dfl + dfr)
        hs_new = max(hs - step, tol)
        if abs(hs_new - hs) <= tol * max(1.0, hs):
            hs = hs_new
            break
        hs = hs_new
    else:
        raise NonConvergence("depth-function Newton iteration did not converge")
    fl, _ = _depth_fn(hs, hl, cl, g)
    fr, _ = _depth_fn(hs, hr, cr, g)
    us = 0.5 * (ul + ur) + 0.5 * (fr - fl)
    cs = np.sqrt(g * hs)

    def sample(xi):
        xi = np.asarray(xi, dtype=float)
        h = np.empty_like(xi)
        u = np.empty_like(xi)

        left = xi < us
        # left wave
        if hs > hl:  # shock
            sl = ul - cl * np.sqrt(0.5 * hs * (hs + hl)) / hl
            pre = left & (xi < sl)
            post = left & ~pre
            h[pre], u[pre] = hl, ul
            h[post], u[post] = hs, us
        else:  # rarefaction
            head = ul - cl
            tail = us - cs
            pre = left & (xi <= head)
            fan = left & (xi > head) & (xi < tail)
            post = left & (xi >= tail)
            h[pre], u[pre] = hl, ul
            cf = (ul + 2.0 * cl - xi[fan]) / 3.0
            h[fan] = cf**2 / g
            u[fan] = xi[fan] + cf
            h[post], u[post] = hs, us

        right = ~left
        if hs > hr:  # shock
            sr = ur + cr * np.sqrt(0.5 * hs * (hs + hr)) / hr
            post = right & (xi > sr)
            pre = right & ~post
            h[post], u[post] = hr, ur
            h[pre], u[pre] = hs, us
        else:  # rarefaction
            head = ur + cr
            tail = us + cs
            post = right & (xi >= head)
            fan = right & (xi < head) & (xi > tail)
            pre = right & (xi <= tail)
            h[post], u[post] = hr, ur
            cf = (xi[fan] - ur + 2.0 * cr) / 3.0
            h[fan] = cf**2 / g
            u[fan] = xi[fan] - cf
            h[pre], u[pre] = hs, us
        return h, u

    sample.h_star = hs  # type: ignore[attr-defined]
    sample.u_star = us  # type: ignore[attr-defined]
    return sample
