"""Real and complex multivariate gamma and beta functions, on the log scale.

The real multivariate gamma is

.. math::

    \\Gamma_p(\\alpha) = \\pi^{p(p-1)/4} \\prod_{j=0}^{p-1} \\Gamma(\\alpha - j/2),
    \\qquad \\alpha > (p-1)/2,

and its complex (Hermitian) analogue is

.. math::

    \\tilde\\Gamma_p(\\alpha) = \\pi^{p(p-1)/2} \\prod_{j=0}^{p-1} \\Gamma(\\alpha - j),
    \\qquad \\alpha > p-1.

Only real arguments are supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import GammaDomainError

__all__ = [
    "HalfInt",
    "GammaDomainError",
    "domain_bound",
    "check_domain",
    "log_gamma_p",
    "log_gamma_p_complex",
    "log_mvgamma",
    "log_beta_p",
    "gamma_p",
    "beta_p",
]

LOG_PI = math.log(math.pi)
CASES = ("real", "complex")


@dataclass(frozen=True, order=True)
class HalfInt:
    """An exact half-integer ``twice_value / 2``."""

    twice_value: int

    def __post_init__(self):
        if not isinstance(self.twice_value, int) or isinstance(self.twice_value, bool):
            raise TypeError(f"twice_value must be an int, got {self.twice_value!r}")

    @classmethod
    def of(cls, value) -> "HalfInt":
        """Build from an int, a Fraction with denominator 1 or 2, or a float k/2."""
        frac = Fraction(value)
        doubled = 2 * frac
        if doubled.denominator != 1:
            raise ValueError(f"{value!r} is not a half-integer")
        return cls(int(doubled))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    def __float__(self):
        return self.twice_value / 2

    def __add__(self, other):
        if isinstance(other, int):
            other = HalfInt(2 * other)
        if not isinstance(other, HalfInt):
            return NotImplemented
        return HalfInt(self.twice_value + other.twice_value)

    __radd__ = __add__

    def __neg__(self):
        return HalfInt(-self.twice_value)

    def __sub__(self, other):
        if isinstance(other, int):
            other = HalfInt(2 * other)
        if not isinstance(other, HalfInt):
            return NotImplemented
        return HalfInt(self.twice_value - other.twice_value)

    def __mul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return HalfInt(self.twice_value * k)

    __rmul__ = __mul__

    def __str__(self):
        if self.twice_value % 2 == 0:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"


def _check_case(case):
    if case not in CASES:
        raise ValueError(f"case must be 'real' or 'complex', got {case!r}")


def _check_p(p):
    if isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise ValueError(f"p must be a positive integer, got {p!r}")


def domain_bound(p: int, case: str = "real") -> float:
    """Strict lower bound on the argument: (p-1)/2 real, p-1 complex."""
    _check_case(case)
    return (p - 1) / 2 if case == "real" else float(p - 1)


def check_domain(p: int, alpha: float, case: str = "real", what: str = "alpha"):
    _check_p(p)
    bound = domain_bound(p, case)
    # no slack: the integral diverges on the boundary
    if not alpha > bound:
        raise GammaDomainError(bound, alpha, case, what)


def log_gamma_p(p: int, alpha: float) -> float:
    """Log of the real multivariate gamma function.

    Raises
    ------
    GammaDomainError
        If ``alpha <= (p - 1) / 2``.
    """
    check_domain(p, alpha, "real")
    total = 0.25 * p * (p - 1) * LOG_PI
    for j in range(p):
        total += math.lgamma(alpha - 0.5 * j)
    return total


def log_gamma_p_complex(p: int, alpha: float) -> float:
    """Log of the complex multivariate gamma function (requires alpha > p - 1)."""
    check_domain(p, alpha, "complex")
    total = 0.5 * p * (p - 1) * LOG_PI
    for j in range(p):
        total += math.lgamma(alpha - j)
    return total


def log_mvgamma(p: int, alpha: float, case: str = "real") -> float:
    _check_case(case)
    if case == "real":
        return log_gamma_p(p, alpha)
    return log_gamma_p_complex(p, alpha)


def log_beta_p(p: int, alpha: float, beta: float, case: str = "real") -> float:
    """Log of the multivariate beta function ``G(a) G(b) / G(a + b)``.

    ``G`` is the real or complex multivariate gamma according to `case`.
    Both `alpha` and `beta` must clear the domain bound of `case`.
    """
    _check_case(case)
    check_domain(p, alpha, case, "alpha")
    check_domain(p, beta, case, "beta")
    return (
        log_mvgamma(p, alpha, case)
        + log_mvgamma(p, beta, case)
        - log_mvgamma(p, alpha + beta, case)
    )


def _exp_checked(log_value, max_log):
    if log_value > max_log:
        raise OverflowError(
            f"log value {log_value:.6g} exceeds the linear-scale threshold {max_log:g}"
        )
    return math.exp(log_value)


def gamma_p(p: int, alpha: float, case: str = "real", max_log: float = 700.0) -> float:
    """Linear-scale multivariate gamma; OverflowError when the log exceeds `max_log`."""
    return _exp_checked(log_mvgamma(p, alpha, case), max_log)


def beta_p(p: int, alpha: float, beta: float, case: str = "real",
           max_log: float = 700.0) -> float:
    return _exp_checked(log_beta_p(p, alpha, beta, case), max_log)
