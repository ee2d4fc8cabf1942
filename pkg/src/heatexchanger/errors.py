"""Exception hierarchy shared by the solvers, certificates and CLI."""


class HeatExchangerError(Exception):
    """Base class for all package errors."""


class ParameterError(HeatExchangerError, ValueError):
    """Invalid model or grid parameter."""


class GridMismatch(HeatExchangerError, ValueError):
    """Field or spectrum shape does not match the grid."""


class Underflow(HeatExchangerError):
    """Signal too small to fit (window chosen too late)."""


class BoxContaminated(HeatExchangerError):
    """Solution reached the edge of the periodic box."""


class Overflow(HeatExchangerError, FloatingPointError):
    """Non-finite values produced by a time step."""


class RegimeViolation(HeatExchangerError, ValueError):
    """Exponent outside the regime required by the requested construction."""


class CertificateUnavailable(HeatExchangerError, ValueError):
    """Data too large for the global-existence certificate."""


class UnsupportedDataFamily(HeatExchangerError, TypeError):
    """Closed-form norms are only available for Gaussian data."""


class GeometryDegenerate(HeatExchangerError, ValueError):
    """The phase-plane region is empty (blur parameter too large)."""


class SearchFailed(HeatExchangerError):
    """The blur-parameter scan reached its floor without success."""


class ComparisonWindowEmpty(HeatExchangerError):
    """No shared sample time before one of the compared runs blew up."""
