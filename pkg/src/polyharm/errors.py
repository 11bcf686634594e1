"""Exception and warning types shared across the package."""


class PolyharmError(Exception):
    """Base class for all library errors."""


class ParameterError(PolyharmError):
    """A parameter vector violates an admissibility condition.

    Carries the offending axis (0-based) and a short condition tag so
    callers (and the CLI) can name the failure precisely.
    """

    def __init__(self, axis: int, condition: str, message: str | None = None):
        self.axis = axis
        self.condition = condition
        super().__init__(message or f"axis {axis}: {condition}")


class PoleError(PolyharmError):
    """Gamma evaluated at a non-positive integer."""


class DivergenceError(PolyharmError):
    """Hypergeometric series requested at x = 1 outside its convergence range."""


class SlowConvergenceError(PolyharmError):
    """Series truncation cap hit without reaching the target tolerance."""


class RadiusError(PolyharmError):
    """Numerical guard: a radius too close to 1 for stable kernel evaluation."""


class InvalidProfileError(PolyharmError):
    """An approach-path profile violates the cone constraints."""


class RestrictionError(PolyharmError):
    """Radii violate the comparability restriction max(1-r) <= B min(1-r)."""


class GridCoarseWarning(UserWarning):
    """Kernel angular width is under-resolved by the quadrature grid."""


class AliasingWarning(UserWarning):
    """Detectable spectral energy above the grid Nyquist order."""
