"""Exception types raised across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class UnsupportedOrderError(DomainError):
    """Parabolic cylinder order outside the supported (negative) range."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PreconditionError(ValueError):
    """Parameters violate the assumptions a closed form relies on."""


class ConfigError(ValueError):
    """Invalid sweep configuration."""
