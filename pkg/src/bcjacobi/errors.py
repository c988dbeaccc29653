"""Exception types shared across the package."""


class BCError(Exception):
    """Base class for all package errors."""


class SpecTooShortError(BCError):
    """A Jacobi coefficient block is too short for the requested horizon."""


class SingularBlockError(BCError):
    """A connecting-operator block is singular; inversion formulas do not apply."""


class NotRealizableError(BCError):
    """Input data cannot be produced by any admissible system or measure."""


class NumericalFailureError(BCError):
    """A numerically degenerate state that is impossible in exact arithmetic."""


class PoleError(BCError):
    """Evaluation requested at (or too close to) a pole."""
