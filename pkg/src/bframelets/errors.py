"""Exception hierarchy.

All library errors derive from :class:`FrameletError`, itself a ``ValueError``
so callers validating input can catch the builtin. The CLI maps
:class:`NumericalError` subclasses to exit code 2 and everything else to 1.
"""


class FrameletError(ValueError):
    pass


class InvalidOrderError(FrameletError):
    """Spline order or framelet index out of range."""


class InvalidInputError(FrameletError):
    pass


class SmoothnessError(FrameletError):
    """Differentiation beyond the smoothness of a piecewise polynomial."""


class UnsupportedCaseError(FrameletError):
    pass


class NumericalError(FrameletError):
    pass


class ToleranceError(NumericalError):
    """A requested accuracy cannot be certified with the given configuration."""


class QuadratureError(NumericalError):
    pass


class PerturbationError(NumericalError):
    """Bessel bound too large for the frame perturbation estimate (R >= A)."""
