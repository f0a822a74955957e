"""Exception hierarchy shared across the package."""


class SymresError(Exception):
    """Base class for all package-specific errors."""


class GridMismatchError(SymresError):
    """Operands live on incompatible grids or fiber dimensions."""


class DomainError(SymresError):
    """An argument is outside the mathematical domain of the operation."""


class UnsupportedDimensionError(SymresError):
    """The operation is not defined for this manifold dimension."""


class SpectralGapError(SymresError):
    """A spectral separation precondition failed; carries a gap report."""

    def __init__(self, message: str, where=None, gap: float | None = None):
        super().__init__(message)
        self.where = where
        self.gap = gap


class MarginError(SymresError):
    """A support does not keep the required distance from the boundary."""


class DecayError(SymresError):
    """A declared kernel decay rate is not supported by sampled values."""


class CutoffError(SymresError):
    """The frequency cutoff is too small for the symbol's bandwidth."""


class QuadratureError(SymresError):
    """An adaptive quadrature failed to reach its target tolerance."""


class TruncationOrderError(SymresError):
    """The truncation order is too small for the requested quantity."""


class ConfigError(SymresError):
    """Scenario configuration failed to parse or validate."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        super().__init__(message)
        self.field = field
        self.line = line
