"""Exception hierarchy.

Configuration and validation problems derive from ``ValueError``; numerical
failures derive from ``ArithmeticError`` so callers (and the CLI) can map
them to distinct exit codes.
"""


class ConfigurationError(ValueError):
    """Inconsistent dimensions, missing data or malformed configuration."""


class ValidationError(ValueError):
    """A physical or numerical parameter is outside its admissible range."""


class MemoryBudgetError(ConfigurationError):
    """The augmented density matrix would exceed the configured memory budget."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to deliver the requested accuracy."""


class QuadratureError(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegeneracyError(NumericalError):
    """The reduced density matrix lost (almost) all of its trace."""
