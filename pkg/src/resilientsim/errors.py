"""Exception types shared across the package."""


class ResilientSimError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(ResilientSimError, ValueError):
    """Operand is empty or has inconsistent dimensions."""


class RankError(ResilientSimError, ValueError):
    """Matrix does not have the full row rank the operation requires."""


class ConstraintError(ResilientSimError, ValueError):
    """An input signal violates its admissible unit-ball constraint."""


class DomainError(ResilientSimError, ValueError):
    """A scalar argument lies outside its mathematical domain."""


class DegenerateInputError(ResilientSimError, ValueError):
    """Constants degenerate (zero divisor) for the requested analysis."""


class CapError(ResilientSimError, ValueError):
    """Requested partition depth exceeds the supported cap."""


class ConfigError(ResilientSimError, ValueError):
    """A run configuration or system document failed validation."""


class NumericError(ResilientSimError, ArithmeticError):
    """A numerical routine failed to converge or to bracket a root."""


class DivergenceError(ResilientSimError, RuntimeError):
    """The integrated state left the representable range.

    Carries the last finite state and, when raised from the closed loop,
    the partial trace accumulated so far.
    """

    def __init__(self, message, t=None, state=None, trace=None):
        super().__init__(message)
        self.t = t
        self.state = state
        self.trace = trace
