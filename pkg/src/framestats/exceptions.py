"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DimensionError(DomainError):
    """Inputs that must share an ambient dimension do not."""


class DataFormatError(ValueError):
    """A data file does not conform to the expected schema."""


class ConvergenceError(ArithmeticError):
    """An iterative numerical routine failed to converge within its cap."""
