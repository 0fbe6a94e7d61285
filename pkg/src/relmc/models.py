"""Flux models, relaxation configuration and characteristic forms.

Scalar conservation laws are described by a :class:`FluxModel` (flux F and
its derivative F').  The relaxation approximation replaces u_t + F(u)_x = 0
by a semi-linear two-speed system whose local equilibria are

    E+(u) = (a u + F(u)) / (2a),      E-(u) = (a u - F(u)) / (2a),

valid under the subcharacteristic condition a^2 > F'(u)^2.  Systems of
n conservation laws use a diagonal relaxation matrix A = diag(a_1..a_n)
and, when Riemann invariants exist, a :class:`CharacteristicModel` carrying
the invariant maps and the per-family characteristic speeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ConfigError,
    DegenerateCell,
    NegativeDensity,
    NegativeDepth,
    SubcharacteristicViolation,
)

__all__ = [
    "FluxModel",
    "RelaxationConfig",
    "SystemModel",
    "CharacteristicModel",
    "equilibrium_split",
    "gradient_probabilities",
    "abs_equilibrium_probabilities",
    "swe_invariants",
    "swe_invariants_inverse",
    "awr_invariants",
    "awr_invariants_inverse",
    "burgers",
    "lwr",
    "custom_flux",
    "swe_system",
    "swe_characteristic",
    "awr_system",
    "awr_characteristic",
    "isentropic_euler_system",
    "scalar_as_system",
    "scalar_as_characteristic",
]


@dataclass(frozen=True)
class FluxModel:
    """Scalar conservation law u_t + F(u)_x = 0."""

    name: str
    flux: Callable[[np.ndarray], np.ndarray]
    flux_deriv: Callable[[np.ndarray], np.ndarray]
    admissible_range: tuple[float, float]
    #: critical points of F inside the admissible range (used by the exact
    #: Riemann flux of the Godunov reference solver)
    sonic_points: tuple[float, ...] = ()

    def max_char_speed(self, u=None, samples: int = 1000) -> float:
        """Largest |F'| over the given states, or over the admissible
        range when no states are supplied."""
        if u is None:
            u = np.linspace(*self.admissible_range, samples)
        return float(np.max(np.abs(self.flux_deriv(np.asarray(u, dtype=float)))))


def burgers() -> FluxModel:
    """Inviscid Burgers equation, F(u) = u^2 / 2."""
    return FluxModel(
        name="burgers",
        flux=lambda u: 0.5 * np.asarray(u) ** 2,
        flux_deriv=lambda u: np.asarray(u, dtype=float) + 0.0,
        admissible_range=(-1.5, 1.5),
        sonic_points=(0.0,),
    )


def lwr() -> FluxModel:
    """Lighthill-Whitham-Richards traffic flux, F(u) = u - u^2."""
    return FluxModel(
        name="lwr",
        flux=lambda u: np.asarray(u) * (1.0 - np.asarray(u)),
        flux_deriv=lambda u: 1.0 - 2.0 * np.asarray(u),
        admissible_range=(0.0, 1.0),
        sonic_points=(0.5,),
    )


def custom_flux(
    name: str,
    flux: Callable,
    flux_deriv: Callable,
    admissible_range: tuple[float, float],
) -> FluxModel:
    """Wrap a user-supplied (F, F') pair, locating interior critical points
    of F numerically for the Godunov flux."""
    lo, hi = admissible_range
    u = np.linspace(lo, hi, 2001)
    d = np.asarray(flux_deriv(u), dtype=float)
    crossings = []
    sign = np.sign(d)
    for i in np.nonzero(sign[1:-1] == 0)[0]:
        crossings.append(float(u[i + 1]))
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        # secant refinement is enough: crit points only steer the min/max
        # candidate search of the Godunov flux
        a, b, da, db = u[i], u[i + 1], d[i], d[i + 1]
        crossings.append(float(a - da * (b - a) / (db - da)))
    return FluxModel(name, flux, flux_deriv, admissible_range, tuple(crossings))


@dataclass(frozen=True)
class RelaxationConfig:
    """Relaxation rate, speeds and time step of the particle solvers.

    ``epsilon=None`` selects the exact zero-relaxation limit (interaction
    probability one).  Finite epsilon with dt/epsilon > 36 routes to the
    same code path to avoid underflow of exp(-dt/epsilon).
    """

    speeds: tuple[float, ...]
    dt: float
    epsilon: float | None = None

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        speeds = tuple(float(a) for a in np.atleast_1d(self.speeds))
        object.__setattr__(self, "speeds", speeds)
        if any(a <= 0 for a in speeds):
            raise ConfigError("relaxation speeds must be positive")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ConfigError("epsilon must be positive or None (zero limit)")

    @property
    def a(self) -> float:
        if len(self.speeds) != 1:
            raise ConfigError("scalar speed requested from a system config")
        return self.speeds[0]

    @property
    def interaction_probability(self) -> float:
        if self.epsilon is None or self.dt / self.epsilon > 36.0:
            return 1.0
        return 1.0 - np.exp(-self.dt / self.epsilon)

    def validate_scalar(self, model: FluxModel, samples: int = 1000) -> None:
        """Subcharacteristic check a > |F'(u)| over the admissible range."""
        u = np.linspace(*model.admissible_range, samples)
        smax = float(np.max(np.abs(model.flux_deriv(u))))
        if self.a <= smax:
            raise SubcharacteristicViolation(
                f"a={self.a} <= max |F'(u)|={smax} on {model.admissible_range}"
            )


@dataclass(frozen=True)
class SystemModel:
    """System of n conservation laws u_t + F(u)_x = 0 in conserved variables.

    ``flux`` and ``jacobian`` act component-wise on stacked state arrays of
    shape (n, ...); ``jacobian_eigenvalues`` returns eigenvalues sorted in
    increasing order.
    """

    name: str
    n: int
    flux: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    jacobian_eigenvalues: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("component count must be >= 1")


@dataclass(frozen=True)
class CharacteristicModel:
    """Diagonal (Riemann-invariant) form of a system.

    ``to_invariants`` maps physical components to invariants Gamma_1..n,
    ``from_invariants`` is its inverse on admissible states, and
    ``char_speeds`` gives the advection speed of each invariant family as a
    function of the invariants (family ordering follows the invariants, not
    a sorted eigenvalue ordering).
    """

    name: str
    base: str
    n: int
    to_invariants: Callable[..., tuple]
    from_invariants: Callable[..., tuple]
    char_speeds: Callable[..., tuple]
    params: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# equilibrium and probability formulas

def equilibrium_split(model: FluxModel, u, a: float):
    """Split the state into the two-speed equilibria E+(u), E-(u).

    E+ + E- = u holds exactly.
    """
    if a <= 0:
        raise ConfigError("relaxation speed a must be positive")
    f = model.flux(u)
    eplus = (a * np.asarray(u, dtype=float) + f) / (2.0 * a)
    return eplus, np.asarray(u, dtype=float) - eplus


def gradient_probabilities(model: FluxModel, u, a: float):
    """Velocity-change probabilities of the derivative dynamics,
    p+- = (a +- F'(u)) / (2a); independent of the derivative itself."""
    fp = np.asarray(model.flux_deriv(u), dtype=float)
    if np.any(np.abs(fp) >= a):
        raise SubcharacteristicViolation(
            f"|F'(u)| >= a={a} encountered (max {float(np.max(np.abs(fp)))})"
        )
    pplus = (a + fp) / (2.0 * a)
    return pplus, 1.0 - pplus


def abs_equilibrium_probabilities(eplus, eminus):
    """Signed-mass velocity probabilities p+- = |E+-| / (|E+| + |E-|)."""
    ep = np.abs(np.asarray(eplus, dtype=float))
    em = np.abs(np.asarray(eminus, dtype=float))
    denom = ep + em
    if np.any(denom == 0.0):
        raise DegenerateCell("|E+| + |E-| = 0; skip relaxation in this cell")
    return ep / denom, em / denom


# ---------------------------------------------------------------------------
# shallow water

def swe_invariants(h, u, g: float):
    """Riemann invariants of shallow water, Gamma_{1,2} = u +- 2 sqrt(g h)."""
    h = np.asarray(h, dtype=float)
    if g <= 0:
        raise ConfigError("gravity must be positive")
    if np.any(h < 0):
        raise NegativeDepth(f"h={float(np.min(h))} < 0")
    c = np.sqrt(g * h)
    return u + 2.0 * c, u - 2.0 * c


def swe_invariants_inverse(g1, g2, g: float):
    """Recover (h, u) from the invariants: h = (G1-G2)^2/(16g), u = (G1+G2)/2."""
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    h = (g1 - g2) ** 2 / (16.0 * g)
    u = 0.5 * (g1 + g2)
    return h, u


def _swe_char_speeds(g1, g2):
    # family 1 carries u + 2c at speed u + c, family 2 carries u - 2c at u - c
    lam1 = (3.0 * np.asarray(g1, dtype=float) + g2) / 4.0
    lam2 = (np.asarray(g1, dtype=float) + 3.0 * np.asarray(g2)) / 4.0
    return lam1, lam2


def swe_system(g: float = 9.8) -> SystemModel:
    """Shallow water in conserved variables (h, hu)."""

    def flux(u):
        h, m = u[0], u[1]
        with np.errstate(divide="ignore", invalid="ignore"):
            vel = np.where(h > 0, m / np.where(h > 0, h, 1.0), 0.0)
        return np.stack([m, 0.5 * g * h**2 + m * vel])

    def jac(u):
        h, m = np.asarray(u[0], dtype=float), np.asarray(u[1], dtype=float)
        vel = np.where(h > 0, m / np.where(h > 0, h, 1.0), 0.0)
        z = np.zeros_like(h)
        return np.array([[z, z + 1.0], [g * h - vel**2, 2.0 * vel]])

    def eigs(u):
        h, m = np.asarray(u[0], dtype=float), np.asarray(u[1], dtype=float)
        vel = np.where(h > 0, m / np.where(h > 0, h, 1.0), 0.0)
        c = np.sqrt(g * np.maximum(h, 0.0))
        return np.stack([vel - c, vel + c])

    return SystemModel("swe", 2, flux, jac, eigs, params={"g": g})


def swe_characteristic(g: float = 9.8) -> CharacteristicModel:
    return CharacteristicModel(
        name="swe-char",
        base="swe",
        n=2,
        to_invariants=lambda h, u: swe_invariants(h, u, g),
        from_invariants=lambda g1, g2: swe_invariants_inverse(g1, g2, g),
        char_speeds=_swe_char_speeds,
        params={"g": g},
    )


# ---------------------------------------------------------------------------
# Aw-Rascle with linear anticipation p(rho) = c_v rho

def awr_invariants(rho, u, c_v: float):
    """Aw-Rascle invariants with p(rho) = c_v rho: Gamma_1 = u + c_v rho,
    Gamma_2 = u."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise NegativeDensity(f"rho={float(np.min(rho))} < 0")
    return u + c_v * rho, np.asarray(u, dtype=float) + 0.0


def awr_invariants_inverse(g1, g2, c_v: float):
    """Recover (rho, u): rho = (G1 - G2)/c_v, u = G2."""
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    return (g1 - g2) / c_v, g2 + 0.0


def _awr_char_speeds(g1, g2):
    # family 1 moves at lambda_1 = u = Gamma_2; family 2 at
    # lambda_2 = u - rho p'(rho) = 2 Gamma_2 - Gamma_1 for linear p
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    return g2 + 0.0, 2.0 * g2 - g1


def awr_system(c_v: float = 6.0) -> SystemModel:
    """Aw-Rascle in conserved variables (rho, y) with y = rho u + c_v rho^2."""

    def flux(u):
        rho, y = u[0], u[1]
        with np.errstate(divide="ignore", invalid="ignore"):
            vel = np.where(rho > 0, (y - c_v * rho**2) / np.where(rho > 0, rho, 1.0), 0.0)
        return np.stack([rho * vel, y * vel])

    def jac(u):
        rho = np.asarray(u[0], dtype=float)
        y = np.asarray(u[1], dtype=float)
        vel = np.where(rho > 0, (y - c_v * rho**2) / np.where(rho > 0, rho, 1.0), 0.0)
        # d(rho u)/d(rho, y) and d(y u)/d(rho, y)
        dvel_drho = np.where(rho > 0, -y / np.where(rho > 0, rho**2, 1.0) - 0.0 * rho, 0.0) - c_v
        dvel_dy = np.where(rho > 0, 1.0 / np.where(rho > 0, rho, 1.0), 0.0)
        return np.array(
            [
                [vel + rho * dvel_drho, rho * dvel_dy],
                [y * dvel_drho, vel + y * dvel_dy],
            ]
        )

    def eigs(u):
        rho = np.asarray(u[0], dtype=float)
        y = np.asarray(u[1], dtype=float)
        vel = np.where(rho > 0, (y - c_v * rho**2) / np.where(rho > 0, rho, 1.0), 0.0)
        return np.stack([vel - c_v * rho, vel + 0.0 * rho])

    return SystemModel("aw-rascle", 2, flux, jac, eigs, params={"c_v": c_v})


def awr_characteristic(c_v: float = 6.0) -> CharacteristicModel:
    return CharacteristicModel(
        name="aw-rascle-char",
        base="aw-rascle",
        n=2,
        to_invariants=lambda rho, u: awr_invariants(rho, u, c_v),
        from_invariants=lambda g1, g2: awr_invariants_inverse(g1, g2, c_v),
        char_speeds=_awr_char_speeds,
        params={"c_v": c_v},
    )


# ---------------------------------------------------------------------------
# isentropic Euler variant with F = (rho u, (rho + rho u^2)/2)

def isentropic_euler_system() -> SystemModel:
    """Two-component gas model with flux (m, (rho + m^2/rho)/2).

    Note this is the stated compact flux of the benchmark problem, which
    differs from a gamma-law isentropic Euler closure.
    """

    def flux(u):
        rho, m = u[0], u[1]
        with np.errstate(divide="ignore", invalid="ignore"):
            vel = np.where(rho > 0, m / np.where(rho > 0, rho, 1.0), 0.0)
        return np.stack([m, 0.5 * (rho + m * vel)])

    def jac(u):
        rho = np.asarray(u[0], dtype=float)
        m = np.asarray(u[1], dtype=float)
        vel = np.where(rho > 0, m / np.where(rho > 0, rho, 1.0), 0.0)
        z = np.zeros_like(rho)
        return np.array([[z, z + 1.0], [0.5 * (1.0 - vel**2), vel]])

    def eigs(u):
        rho = np.asarray(u[0], dtype=float)
        m = np.asarray(u[1], dtype=float)
        vel = np.where(rho > 0, m / np.where(rho > 0, rho, 1.0), 0.0)
        disc = np.sqrt(2.0 - vel**2 + 0.0 * rho)
        return np.stack([0.5 * (vel - disc), 0.5 * (vel + disc)])

    return SystemModel("isentropic-euler", 2, flux, jac, eigs)


# ---------------------------------------------------------------------------
# n = 1 embeddings used for consistency checks between scalar and system code

def scalar_as_system(model: FluxModel) -> SystemModel:
    return SystemModel(
        name=model.name,
        n=1,
        flux=lambda u: np.stack([model.flux(u[0])]),
        jacobian=lambda u: np.array([[model.flux_deriv(u[0])]]),
        jacobian_eigenvalues=lambda u: np.stack([model.flux_deriv(u[0])]),
    )


def scalar_as_characteristic(model: FluxModel) -> CharacteristicModel:
    return CharacteristicModel(
        name=model.name + "-char",
        base=model.name,
        n=1,
        to_invariants=lambda u: (np.asarray(u, dtype=float) + 0.0,),
        from_invariants=lambda g1: (np.asarray(g1, dtype=float) + 0.0,),
        char_speeds=lambda g1: (np.asarray(model.flux_deriv(g1), dtype=float),),
        params={},
    )


def validate_system_speeds(
    model: SystemModel,
    speeds: Sequence[float],
    states: np.ndarray,
) -> None:
    """Majda-Pego style check a_h > |lambda_h| over a sample of states.

    ``states`` has shape (n, k); eigenvalues are compared in sorted order
    against sorted speeds.
    """
    lam = np.sort(np.asarray(model.jacobian_eigenvalues(states)), axis=0)
    a = np.sort(np.asarray(speeds, dtype=float))
    if a.size != model.n:
        raise ConfigError(f"expected {model.n} speeds, got {a.size}")
    worst = np.max(np.abs(lam), axis=1)
    if np.any(a <= worst):
        raise SubcharacteristicViolation(
            f"speeds {tuple(a)} do not dominate eigenvalues (max {tuple(worst)})"
        )
