"""Exception types raised across the package."""


class DegenerateInputError(ValueError):
    """Input sits on a singular locus (x = 0, vanishing bracket, pole)."""


class PreconditionError(ValueError):
    """Matrix or operator input violates a structural requirement."""


class ConvergenceError(RuntimeError):
    """An iterative kernel did not converge within its iteration cap."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SingularityError(RuntimeError):
    """A trajectory approached the centre of force and was aborted."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NonRealResultError(ValueError):
    """A quantity expected to be real came out with a significant imaginary part."""
