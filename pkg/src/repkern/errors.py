"""Exception types shared across the package."""


class PoleError(ValueError):
    """A function was evaluated at a pole of its parameter domain."""


class NonconvergenceError(RuntimeError):
    """An iterative computation failed to meet its tolerance within budget."""


class QuadratureError(RuntimeError):
    """A quadrature rule could not reach the requested accuracy."""


class IndefiniteMatrixError(ValueError):
    """A moment matrix failed positive definiteness.

    Usually means the moments are not those of a positive measure at the
    working precision. Recompute the moments at a higher accuracy target or
    raise precision_bits.
    """


class ConditioningError(ValueError):
    """Inputs sit in a region where the requested formula loses all accuracy."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of the operation."""


class BelowThresholdError(ValueError):
    """A closed-form basis element was requested below its validated degree range."""
