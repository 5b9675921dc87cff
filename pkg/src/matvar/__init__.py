"""Matrix-variate gamma and beta integrals in the real and complex cases.

Closed forms live in :mod:`matvar.gammafn`, exact reduction ledgers in
:mod:`matvar.reduction`, densities and samplers in :mod:`matvar.densities`
and :mod:`matvar.samplers`, and numerical oracles in :mod:`matvar.verify`.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateWeights,
    DomainViolation,
    GammaDomainError,
    InvalidSchedule,
    MatvarError,
    NotPositiveDefinite,
    NotSymmetric,
    QuadratureNonConvergence,
)
from .gammafn import HalfInt, beta_p, gamma_p, log_beta_p, log_gamma_p, log_gamma_p_complex

__all__ = [
    "__version__",
    "DegenerateWeights",
    "DomainViolation",
    "GammaDomainError",
    "InvalidSchedule",
    "MatvarError",
    "NotPositiveDefinite",
    "NotSymmetric",
    "QuadratureNonConvergence",
    "HalfInt",
    "beta_p",
    "gamma_p",
    "log_beta_p",
    "log_gamma_p",
    "log_gamma_p_complex",
]
