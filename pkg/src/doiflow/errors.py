"""Exception types shared across the package."""


class DoiflowError(Exception):
    """Base class for all package errors."""


class InvalidInput(DoiflowError):
    """Input data violates a constructor contract (non-finite entries, empty atoms, ...)."""


class ShapeError(DoiflowError):
    """Operand dimensions are incompatible."""


class DomainError(DoiflowError):
    """A scalar function was evaluated outside its usable domain (non-finite value)."""


class ConvergenceFailure(DoiflowError):
    """An iterative solver exhausted its iteration budget.

    Carries the final residual so callers can report it.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PatchError(DoiflowError):
    """A spectral patch has an empty inside or outside component."""


class GapError(DoiflowError):
    """The isolation gap between a patch and the rest of the spectrum is violated."""


class ContourError(DoiflowError):
    """A resolvent contour passes too close to the spectrum."""


class TruncationError(DoiflowError):
    """A truncated integral left too much mass outside the integration window."""


class QuadratureError(DoiflowError):
    """A quadrature rule failed its internal accuracy check."""


class ConfigError(DoiflowError):
    """A scenario configuration failed to parse or validate."""
