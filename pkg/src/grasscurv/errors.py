"""Exception types raised across the package."""


class GrassCurvError(Exception):
    """Base class for all errors raised by grasscurv."""


class ZeroPolynomial(GrassCurvError, ValueError):
    pass


class PoleAtPoint(GrassCurvError, ArithmeticError):
    pass


class DegreeOverflow(GrassCurvError, OverflowError):
    pass


class DegenerateAtPoint(GrassCurvError, ArithmeticError):
    """A norm used for normalisation vanished at the evaluation point."""


class DegenerateMetric(GrassCurvError, ArithmeticError):
    """The induced metric (energy density) vanishes, so curvature is undefined."""


class UnsupportedRank(GrassCurvError, ValueError):
    pass


class UnsupportedFrame(GrassCurvError, ValueError):
    pass


class BadDimension(GrassCurvError, ValueError):
    pass


class BadExponents(GrassCurvError, ValueError):
    pass


class PowerMismatch(GrassCurvError, ValueError):
    pass


class NotHermitian(GrassCurvError, ValueError):
    pass
