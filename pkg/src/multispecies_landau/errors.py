"""Exception types raised by the package."""


class InvalidGridError(ValueError):
    """Grid parameters outside the supported range."""


class GridMismatchError(ValueError):
    """Fields defined on incompatible grids."""


class ParameterError(ValueError):
    """Invalid species or configuration parameters."""


class DegenerateStateError(ValueError):
    """State whose macroscopic quantities are undefined (zero mass, nonpositive temperature)."""


class BlowUpError(FloatingPointError):
    """Non-finite values produced during time integration."""

    def __init__(self, message, species=None, node=None):
        super().__init__(message)
        self.species = species
        self.node = node


class IndeterminateRatioError(ZeroDivisionError):
    """Gamma integral too small for a meaningful Gamma_2 / Gamma ratio."""
