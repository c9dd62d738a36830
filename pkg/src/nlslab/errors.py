"""Exception types shared across the package."""


class NlsLabError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(NlsLabError):
    """Invalid input data or configuration."""


class DomainEscapeError(NlsLabError):
    """Solution mass reached the outer region of the periodic box."""


class NonZeroMeanError(NlsLabError):
    """Negative-order fractional derivative applied to a field with nonzero mean."""


class GridTooLargeError(NlsLabError):
    """Brute-force trilinear evaluation requested on a grid above the cost cap."""


class UnsupportedSymbolError(NlsLabError):
    """Fast trilinear path requested for a symbol that is not separable."""


class BeyondBlowupError(NlsLabError):
    """Closed-form ODE solution evaluated at or past its blow-up horizon."""


class QuadratureError(NlsLabError):
    """Checkpoint sequence too sparse for the requested quadrature."""


class BlowUpError(NlsLabError):
    """Time step produced non-finite values."""


class LatticeTooCoarseWarning(UserWarning):
    """Finite-difference seminorm changed too much under lattice refinement."""
