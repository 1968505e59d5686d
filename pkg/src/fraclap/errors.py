"""Exception types shared across the library."""


class FraclapError(Exception):
    """Base class for all library errors."""


class OutOfRange(FraclapError, ValueError):
    """A parameter violates its admissible range."""

    def __init__(self, field, message=""):
        self.field = field
        super().__init__(f"{field}: {message}" if message else str(field))


class DuplicateRadius(FraclapError, ValueError):
    pass


class NonFiniteValue(FraclapError, ValueError):
    pass


class GridTooSmall(FraclapError, ValueError):
    pass


class TailRequired(FraclapError, ValueError):
    """Evaluation beyond the grid needs a tail record."""


class NoConvergence(FraclapError, ArithmeticError):
    """Quadrature subdivision budget exhausted.

    Carries the best estimate and an error bound so sweep jobs can
    degrade gracefully instead of losing the partial result.
    """

    def __init__(self, best_estimate, error_bound, message="quadrature did not converge"):
        self.best_estimate = best_estimate
        self.error_bound = error_bound
        super().__init__(f"{message} (best={best_estimate!r}, bound={error_bound!r})")


class NotInLalpha(FraclapError, ValueError):
    """Tail growth makes the nonlocal membership integral diverge."""


class ResolutionTooCoarse(FraclapError, ValueError):
    """Grid too coarse near the evaluation point for a second-difference estimate."""


class DivergentTail(FraclapError, ValueError):
    pass


class Singular(FraclapError, ValueError):
    """Evaluation requested exactly on a non-integrable singular set."""


class XOutsideBall(FraclapError, ValueError):
    pass


class PQNotSupercritical(FraclapError, ValueError):
    pass


class NonPositiveValues(FraclapError, ValueError):
    pass


class BumpInvalid(FraclapError, ValueError):
    pass


class NotSubcritical(FraclapError, ValueError):
    pass


class DivergentConvolution(FraclapError, ValueError):
    pass
