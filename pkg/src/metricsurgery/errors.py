"""Exception hierarchy shared by every module of the toolkit."""


class GeometryError(Exception):
    """Base class; the CLI maps any subclass to exit code 3."""


class GridOutOfDomain(GeometryError):
    pass


class WarpingNonpositiveOnGrid(GeometryError):
    pass


class ConePoint(GeometryError):
    pass


class QuadratureNonconvergent(GeometryError):
    pass


class NoCenter(GeometryError):
    pass


class InsufficientSmoothness(GeometryError):
    pass


class CapExceedsSphere(GeometryError):
    pass


class NoRoot(GeometryError):
    def __init__(self, message, attempts=()):
        super().__init__(message)
        self.attempts = list(attempts)


class WindowTooNarrow(GeometryError):
    pass


class ConeAngleExceedsSmooth(GeometryError):
    pass


class ConcaveInterpolantInfeasible(GeometryError):
    pass


class FloorUnachievable(GeometryError):
    def __init__(self, message, worst_point=None, margin=None):
        super().__init__(message)
        self.worst_point = worst_point
        self.margin = margin


class SeamNotConvexifying(GeometryError):
    pass


class UnknownSeries(GeometryError):
    pass


class SeamMismatch(GeometryError):
    """Adjacent pieces disagree beyond the requested matching order."""
