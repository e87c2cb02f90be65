"""Exception types shared across the package."""


class Combust1DError(Exception):
    """Base class for all package errors."""


class ConfigError(Combust1DError):
    """Malformed or inconsistent configuration."""


class BoundViolation(ConfigError):
    """Initial data violates a hard pointwise bound (v0 <= 0, Z0 outside [0,1], ...)."""


class NormalizationError(ConfigError):
    """Initial specific volume on the unit interval does not integrate to 1."""


class LinearSolveFailure(Combust1DError):
    """A tridiagonal solve failed; usually signals a corrupted state (v <= 0)."""


class StateInvariantViolation(Combust1DError):
    """A state lost positivity of v or theta, or Z left [0,1] beyond tolerance."""


class NoAdmissiblePoint(Combust1DError):
    """No grid node has both v and theta inside [alpha0, beta0]."""
