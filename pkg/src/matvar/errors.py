"""Exception hierarchy shared across the package."""


class MatvarError(Exception):
    """Base class for all errors raised by matvar."""


class GammaDomainError(MatvarError, ValueError):
    """A gamma/beta argument lies on or below its convergence bound.

    Attributes
    ----------
    required_bound : float
        The argument must be strictly greater than this value.
    actual : float
        The offending argument.
    case : str
        ``"real"`` or ``"complex"``.
    """

    def __init__(self, required_bound, actual, case="real", what="alpha"):
        self.required_bound = float(required_bound)
        self.actual = float(actual)
        self.case = case
        self.what = what
        super().__init__(
            f"{what}={self.actual:g} must exceed {self.required_bound:g} ({case} case)"
        )


class NotPositiveDefinite(MatvarError, ValueError):
    pass


class NotSymmetric(MatvarError, ValueError):
    def __init__(self, deviation, tol):
        self.deviation = deviation
        self.tol = tol
        super().__init__(
            f"relative asymmetry {deviation:.3e} exceeds tolerance {tol:.1e}"
        )


class DomainViolation(MatvarError, ValueError):
    """A matrix lies outside the support of the requested density."""


class InvalidSchedule(MatvarError, ValueError):
    pass


class QuadratureNonConvergence(MatvarError, RuntimeError):
    pass


class DegenerateWeights(MatvarError, RuntimeError):
    def __init__(self, ess, n):
        self.ess = ess
        self.n = n
        super().__init__(f"effective sample size {ess:.1f} is below 1% of n={n}")
