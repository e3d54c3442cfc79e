"""Exception types shared across the library."""


class DomainError(ValueError):
    """An input violates a mathematical precondition (exponent range, interval bound, ...)."""


class QuadratureError(ArithmeticError):
    """A radial integral is non-integrable or could not be computed to tolerance."""


class DivergenceError(ArithmeticError):
    """An integral diverges at infinity (tail exponent >= -1)."""


class DegenerateError(RuntimeError):
    """A computation degenerated: stalled solver state, empty or gradient-free probe family."""


class RangeError(ValueError):
    """A time or index range falls outside the recorded data."""
