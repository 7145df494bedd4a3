"""Exception types raised by the numerical routines."""


class NumericsError(RuntimeError):
    """Base class for numerical failures (maps to CLI exit code 3)."""


class HermiteOverflowError(NumericsError, OverflowError):
    """Raw Hermite polynomial left the float64 range."""


class QuadratureError(NumericsError):
    """Adaptive quadrature exhausted its panel budget."""


class SeriesConvergenceError(NumericsError):
    """A truncated series failed its Cauchy test."""


class DegenerateChannelError(NumericsError):
    """p00 + p11 - 1 vanishes, so the closed-form optimal prior is undefined."""


class RejectionBudgetError(NumericsError):
    """Rejection sampler hit its trial budget."""
