"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Operands have incompatible dimensions."""


class BudgetExceeded(RuntimeError):
    """A search or enumeration would exceed its configured budget."""


class HeightExhausted(BudgetExceeded):
    """A bounded-height search ran out of room before succeeding."""


class TriesExhausted(BudgetExceeded):
    """A randomized search used up its retry budget."""


class HenselConditionFailed(ArithmeticError):
    """The quantitative lifting condition (residual < minor^2) does not hold."""

    def __init__(self, message, minor_columns=None, minor_valuation=None):
        super().__init__(message)
        self.minor_columns = minor_columns
        self.minor_valuation = minor_valuation


class NotApplicable(ValueError):
    """A formula was queried outside its validity range."""


class IncompatibleTarget(ValueError):
    """A local approximation target does not lie on the variety it claims to."""


class SchemaError(ValueError):
    """Malformed JSON input for one of the documented schemas."""
