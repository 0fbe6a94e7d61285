"""Named benchmark setups and a one-call runner for each.

Each preset bundles a model, initial data, domain, relaxation speeds, and
default numerical parameters, and knows which solver variants apply to it.
Every numerical field can be overridden at run time.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import ConfigError
from .gbmc_scalar import run_gbmc
from .mc_scalar import run_mc
from .models import (
    RelaxationConfig,
    awr_characteristic,
    awr_system,
    burgers,
    isentropic_euler_system,
    lwr,
    swe_characteristic,
    swe_system,
)
from .reconstruct import Grid
from .reference import godunov_scalar, relaxation_fv_system
from .results import RunResult
from .systems import run_gbmc_characteristic, run_gbmc_meshed, run_mc_systems

__all__ = ["Preset", "PRESETS", "run_preset", "preset_names"]


@dataclass(frozen=True)
class Preset:
    name: str
    kind: str  # "scalar" | "characteristic" | "system"
    domain: tuple[float, float]
    t_final: float
    dt: float
    speeds: tuple[float, ...]
    n: int
    m: int
    method: str
    description: str
    scalar_model: object = None
    scalar_u0: Callable = None
    system_model: object = None
    system_u0: Callable = None
    char_model: object = None
    primitives0: Callable = None
    component_names: tuple[str, ...] = ("u",)


def _square(lo, hi, level):
    def u0(x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= lo) & (x <= hi), level, 0.0)
    return u0


def _gaussian(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x**2) / np.sqrt(2.0 * np.pi)


def _sinus(x):
    return np.sin(np.asarray(x, dtype=float))


def _lwr_rp(x):
    x = np.asarray(x, dtype=float)
    u = np.zeros_like(x)
    u[(x >= -1.0) & (x <= 0.0)] = 0.4
    u[(x > 0.0) & (x <= 1.0)] = 0.8
    return u


def _riemann(left, right, x0=0.0):
    def fn(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < x0, left, right)
    return fn


def _swe_primitives(x):
    x = np.asarray(x, dtype=float)
    return _riemann(1.0, 2.0)(x), np.zeros_like(x)


def _swe_primitives_b(x):
    x = np.asarray(x, dtype=float)
    return np.ones_like(x), _riemann(-5.0, 5.0)(x)


def _awr_primitives(x):
    x = np.asarray(x, dtype=float)
    return np.full_like(x, 0.05), _riemann(0.05, 0.5)(x)


def _awr_conserved(x):
    rho, u = _awr_primitives(x)
    return np.stack([rho, rho * u + 6.0 * rho**2])


def _swe_conserved(x):
    h, u = _swe_primitives(x)
    return np.stack([h, h * u])


def _swe_conserved_b(x):
    h, u = _swe_primitives_b(x)
    return np.stack([h, h * u])


def _euler_rp(rho_l, m_l, rho_r, m_r, x0=0.0):
    def fn(x):
        x = np.asarray(x, dtype=float)
        return np.stack(
            [np.where(x < x0, rho_l, rho_r), np.where(x < x0, m_l, m_r)]
        )
    return fn


PRESETS: dict[str, Preset] = {}


def _register(p: Preset):
    PRESETS[p.name] = p


_register(Preset(
    name="test1a", kind="scalar", domain=(-10.0, 10.0), t_final=10.0, dt=0.5,
    speeds=(0.4,), n=1000, m=50, method="mc",
    scalar_model=burgers(), scalar_u0=_gaussian,
    description="quadratic flux, Gaussian bump, direct MC",
))
_register(Preset(
    name="test1b", kind="scalar", domain=(-4.0, 6.0), t_final=10.0, dt=0.01,
    speeds=(0.6,), n=1000, m=100, method="gbmc",
    scalar_model=burgers(), scalar_u0=_square(-2.0, 2.0, 0.4),
    description="quadratic flux, square wave, gradient solver",
))
_register(Preset(
    name="test1c", kind="scalar", domain=(0.0, 2.0 * np.pi), t_final=3.0, dt=0.01,
    speeds=(1.5,), n=1000, m=100, method="gbmc",
    scalar_model=burgers(), scalar_u0=_sinus,
    description="quadratic flux, sinusoidal datum with signed masses",
))
_register(Preset(
    name="test2", kind="scalar", domain=(-1.5, 1.5), t_final=0.5, dt=0.01,
    speeds=(1.2,), n=1000, m=100, method="gbmc",
    scalar_model=lwr(), scalar_u0=_lwr_rp,
    description="concave traffic flux, double Riemann datum",
))
_register(Preset(
    name="test3a", kind="characteristic", domain=(-0.5, 0.5), t_final=0.075, dt=1e-4,
    speeds=(4.45, 5.10), n=2000, m=100, method="gbmc-char",
    system_model=swe_system(), system_u0=_swe_conserved,
    char_model=swe_characteristic(), primitives0=_swe_primitives,
    component_names=("h", "u"),
    description="shallow water dam break, characteristic gradient solver",
))
_register(Preset(
    name="test3b", kind="characteristic", domain=(-1.0, 1.0), t_final=0.1, dt=5e-5,
    speeds=(8.20, 8.20), n=2000, m=100, method="gbmc-char",
    system_model=swe_system(), system_u0=_swe_conserved_b,
    char_model=swe_characteristic(), primitives0=_swe_primitives_b,
    component_names=("h", "u"),
    description="shallow water double rarefaction toward dry bed",
))
_register(Preset(
    name="test4", kind="characteristic", domain=(-1.5, 1.5), t_final=1.0, dt=5e-4,
    speeds=(0.8, 0.8), n=2000, m=100, method="gbmc-char",
    system_model=awr_system(), system_u0=_awr_conserved,
    char_model=awr_characteristic(), primitives0=_awr_primitives,
    component_names=("rho", "u"),
    description="traffic system with linear anticipation, vacuum-forming datum",
))
_register(Preset(
    name="test5a", kind="system", domain=(-1.0, 1.0), t_final=0.5, dt=0.005,
    speeds=(1.0, 1.0), n=200_000, m=200, method="mc-systems",
    system_model=isentropic_euler_system(),
    system_u0=_euler_rp(2.0, 1.0, 1.0, 0.13962, x0=0.2),
    component_names=("rho", "m"),
    description="isentropic gas, shock-contact datum, signed-mass MC",
))
_register(Preset(
    name="test5b", kind="system", domain=(-1.0, 1.0), t_final=0.5, dt=0.005,
    speeds=(1.0, 1.0), n=200_000, m=200, method="mc-systems",
    system_model=isentropic_euler_system(),
    system_u0=_euler_rp(1.0, 0.0, 0.2, 0.0),
    component_names=("rho", "m"),
    description="isentropic gas, density drop at rest",
))


def preset_names() -> list[str]:
    return sorted(PRESETS)


_SCALAR_METHODS = {"mc", "mc-lowvar", "mc-weighted", "gbmc", "fv-reference"}
_MC_VARIANTS = {"mc": "baseline", "mc-lowvar": "lowvar", "mc-weighted": "weighted"}


def run_preset(
    name: str,
    method: str | None = None,
    seed: int = 0,
    n: int | None = None,
    m: int | None = None,
    dt: float | None = None,
    t_final: float | None = None,
    epsilon: float | None = None,
    snapshot_times=None,
) -> RunResult:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {preset_names()}")
    p = PRESETS[name]
    overrides = {}
    if n is not None:
        overrides["n"] = n
    if m is not None:
        overrides["m"] = m
    if dt is not None:
        overrides["dt"] = dt
    if t_final is not None:
        overrides["t_final"] = t_final
    if method is not None:
        overrides["method"] = method
    p = replace(p, **overrides)

    config = RelaxationConfig(speeds=p.speeds, dt=p.dt, epsilon=epsilon)
    grid = Grid(p.domain[0], p.domain[1], p.m)

    if p.kind == "scalar":
        if p.method not in _SCALAR_METHODS:
            raise ConfigError(f"method {p.method!r} does not apply to preset {name!r}")
        if p.method == "gbmc":
            return run_gbmc(p.scalar_model, p.scalar_u0, p.domain, config, p.n,
                            p.t_final, seed, snapshot_times=snapshot_times)
        if p.method == "fv-reference":
            return godunov_scalar(p.scalar_model, p.scalar_u0, p.domain, p.m, p.t_final)
        return run_mc(p.scalar_model, p.scalar_u0, p.domain, grid, config, p.n,
                      p.t_final, seed, variant=_MC_VARIANTS[p.method],
                      snapshot_times=snapshot_times)

    if p.method == "mc-systems":
        return run_mc_systems(p.system_model, p.system_u0, p.domain, grid, config,
                              p.n, p.t_final, seed, snapshot_times=snapshot_times)
    if p.method == "gbmc-char":
        if p.char_model is None:
            raise ConfigError(f"preset {name!r} has no characteristic form")
        return run_gbmc_characteristic(p.char_model, p.primitives0, p.domain, config,
                                       p.n, p.t_final, seed,
                                       snapshot_times=snapshot_times)
    if p.method == "gbmc-meshed":
        return run_gbmc_meshed(p.system_model, p.system_u0, p.domain, grid, config,
                               p.n, p.t_final, seed, snapshot_times=snapshot_times)
    if p.method == "fv-reference":
        fv_dt = grid.dx / max(p.speeds)
        fv_config = RelaxationConfig(speeds=p.speeds, dt=fv_dt, epsilon=epsilon)
        steps = int(np.ceil(p.t_final / fv_dt))
        fv_config = RelaxationConfig(speeds=p.speeds, dt=p.t_final / steps,
                                     epsilon=epsilon)
        return relaxation_fv_system(p.system_model, p.system_u0, p.domain, p.m,
                                    fv_config, p.t_final)
    raise ConfigError(f"method {p.method!r} does not apply to preset {name!r}")
