"""Exception types shared across the package."""


class StructuralError(ValueError):
    """Input has the wrong shape, symmetry, sign or range."""


class NumericError(ArithmeticError):
    """A factorization or iteration failed on numerically valid-looking input."""


class StatisticalError(RuntimeError):
    """A Monte Carlo estimate is too poor to support the requested fit."""


class ConfigError(ValueError):
    """A scenario configuration violates one or more model constraints."""
