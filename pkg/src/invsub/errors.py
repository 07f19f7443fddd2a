"""Exception types raised by the toolkit."""


class InvsubError(Exception):
    """Base class for all toolkit errors."""


class InvalidDistributionError(InvsubError, ValueError):
    """A distribution function produced a value it never should (NaN, -inf)."""

    def __init__(self, message, x=None):
        super().__init__(message if x is None else f"{message} (at x={x!r})")
        self.x = x


class InvalidTransformError(InvsubError, ValueError):
    pass


class EvaluationError(InvsubError, ValueError):
    """A scanned function returned a non-finite value."""

    def __init__(self, message, location=None):
        super().__init__(message if location is None else f"{message} (at {location!r})")
        self.location = location


class AccuracyError(InvsubError, ArithmeticError):
    """Quadrature refinement did not converge; carries the last two estimates."""

    def __init__(self, message, estimates):
        super().__init__(f"{message}: last estimates {estimates[0]!r}, {estimates[1]!r}")
        self.estimates = tuple(estimates)


class InvalidWeightsError(InvsubError, ValueError):
    pass


class SpecError(InvsubError, ValueError):
    """Malformed or unknown distribution spec string."""
