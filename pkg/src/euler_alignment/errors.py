"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(ValueError):
    """Inconsistent sizes, grids or run parameters."""


class InadmissibleLevelError(ValueError):
    """The level set of the requested ``k`` carries kernel weight >= C0."""


class AnalyticFallback(Exception):
    """The closed-form power-law path does not apply; use the numeric optimizer."""


class StepSizeError(RuntimeError):
    """A time step violates the CFL restriction or cannot be made small enough."""


class DegenerateStateError(ValueError):
    """The state has no mass (or no particles with mass)."""


class InputError(ValueError):
    """Initial data violates a sign or shape requirement."""
