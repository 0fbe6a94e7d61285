"""Exception types shared across the particle and finite-volume solvers."""


class RelmcError(Exception):
    """Base class for all solver errors."""


class SubcharacteristicViolation(RelmcError):
    """Relaxation speed does not dominate the characteristic speed; the
    chosen a (or a_h) is too small for the states encountered."""


class DegenerateCell(RelmcError):
    """Both equilibrium magnitudes vanish in a cell; no probabilistic
    interpretation is available there."""


class NegativeEquilibrium(RelmcError):
    """E+(u) or E-(u) went negative where the unsigned solver requires
    nonnegativity; the weighted (signed-mass) variant must be used."""


class ZeroMass(RelmcError):
    """Initial datum has zero L1 norm; nothing to sample."""


class ZeroVariation(RelmcError):
    """Initial datum has zero total variation; its derivative carries no
    mass to sample."""


class NegativeDepth(RelmcError):
    """Water depth below zero."""


class NegativeDensity(RelmcError):
    """Density below zero."""


class CflViolation(RelmcError):
    """Time step exceeds the stability limit of a finite-volume solver."""


class NonConvergence(RelmcError):
    """An iterative solver failed to reach its tolerance."""


class ZeroReference(RelmcError):
    """Reference solution has zero norm; a relative error is undefined."""


class ConfigError(RelmcError):
    """Invalid run configuration; message names the offending field."""
