"""Exception hierarchy shared by all modules."""


class SteptwoError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(SteptwoError):
    pass


class DimensionMismatch(SteptwoError):
    pass


class NotSkewSymmetric(SteptwoError):
    def __init__(self, beta, k, l):
        self.index = (beta, k, l)
        super().__init__(f"B^{beta + 1} is not skew-symmetric at entry ({k}, {l})")


class Degenerate(SteptwoError):
    def __init__(self, tau, sigma_min, threshold):
        self.tau = tau
        self.sigma_min = sigma_min
        super().__init__(
            f"B^tau is degenerate at tau={list(map(float, tau))}: "
            f"sigma_min={sigma_min:.3e} < {threshold:.1e}"
        )


class DegenerateTau(SteptwoError):
    pass


class ZeroTau(SteptwoError):
    pass


class NonPositiveLambda(SteptwoError):
    pass


class NegativeDegree(SteptwoError):
    pass


class NegativeArgument(SteptwoError):
    pass


class DegreeCapExceeded(SteptwoError):
    pass


class SpectrumEscapedContour(SteptwoError):
    pass


class QuadratureNotConverged(SteptwoError):
    pass


class YZero(SteptwoError):
    pass


class OriginPoint(SteptwoError):
    pass


class RNotInRange(SteptwoError):
    pass


class WrongSpace(SteptwoError):
    pass


class GridMismatch(SteptwoError):
    pass


class ConfigError(SteptwoError):
    pass
