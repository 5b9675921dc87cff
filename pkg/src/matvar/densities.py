"""Log-densities of the matrix-variate gamma and type-1/type-2 beta families.

Densities are taken with respect to Lebesgue measure on the free entries
(``x_ij, i >= j``; real and imaginary parts separately in the complex case).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation, NotPositiveDefinite
from .gammafn import check_domain, log_beta_p, log_mvgamma
from .matcore import as_array, log_det, positive_definite

__all__ = [
    "MatrixGammaParams",
    "MatrixBetaParams",
    "log_density_gamma",
    "log_density_beta",
]


def _h(p: int, case: str) -> float:
    return (p + 1) / 2 if case == "real" else float(p)


@dataclass(frozen=True)
class MatrixGammaParams:
    """Shape ``alpha`` and positive-definite scale ``B`` (identity when omitted)."""

    p: int
    alpha: float
    scale_B: object = None
    case: str = "real"

    def __post_init__(self):
        check_domain(self.p, self.alpha, self.case)
        B = np.eye(self.p) if self.scale_B is None else as_array(self.scale_B)
        B = positive_definite(np.asarray(B, dtype=complex if self.case == "complex" else float),
                              self.case)
        if B.p != self.p:
            raise ValueError(f"scale_B is {B.p}x{B.p}, expected {self.p}x{self.p}")
        object.__setattr__(self, "scale_B", B)


@dataclass(frozen=True)
class MatrixBetaParams:
    p: int
    alpha: float
    beta: float
    kind: str = "type1"
    case: str = "real"

    def __post_init__(self):
        if self.kind not in ("type1", "type2"):
            raise ValueError(f"kind must be 'type1' or 'type2', got {self.kind!r}")
        check_domain(self.p, self.alpha, self.case, "alpha")
        check_domain(self.p, self.beta, self.case, "beta")


def _as_case_pd(X, case, what):
    if case == "real" and np.iscomplexobj(X):
        raise ValueError(f"complex {what} given for a real density")
    try:
        return positive_definite(np.asarray(as_array(X), dtype=complex if case == "complex" else float),
                                 case)
    except NotPositiveDefinite as exc:
        raise DomainViolation(f"{what} is not positive definite: {exc}") from None


def _trace_product(B: np.ndarray, X: np.ndarray) -> float:
    # tr(BX) = sum_ij B_ij X_ji without forming BX
    return float(np.real(np.sum(B * X.T)))


def log_density_gamma(params: MatrixGammaParams, X, checked: bool = True) -> float:
    """``log f(X)`` for ``f(X) = |B|^a / G_p(a) |X|^(a - h) exp(-tr(BX))``.

    ``h = (p+1)/2`` and ``G_p = Γ_p`` in the real case; ``h = p`` and the
    complex multivariate gamma otherwise.  With ``checked=False`` a matrix
    outside the cone gives ``-inf`` instead of raising.
    """
    p, a, case = params.p, params.alpha, params.case
    arr = as_array(X)
    if arr.shape != (p, p):
        raise ValueError(f"X has shape {arr.shape}, expected ({p}, {p})")
    try:
        Xpd = _as_case_pd(arr, case, "X")
    except DomainViolation:
        if checked:
            raise
        return -np.inf
    B = params.scale_B
    return (
        a * log_det(B)
        - log_mvgamma(p, a, case)
        + (a - _h(p, case)) * log_det(Xpd)
        - _trace_product(B.entries, Xpd.entries)
    )


def log_density_beta(params: MatrixBetaParams, X, checked: bool = True) -> float:
    """Type-1 (``O < X < I``) or type-2 (``X > O``) matrix beta log-density.

    Raises
    ------
    DomainViolation
        When `X` (or ``I - X`` for type 1) is not positive definite, unless
        ``checked=False``, in which case ``-inf`` is returned.

    Notes
    -----
    The complex type-2 normalizer is taken to be the complex multivariate
    beta function by analogy with the type-1 case.
    """
    p, a, b, case = params.p, params.alpha, params.beta, params.case
    arr = as_array(X)
    if arr.shape != (p, p):
        raise ValueError(f"X has shape {arr.shape}, expected ({p}, {p})")
    h = _h(p, case)
    eye = np.eye(p)
    try:
        ld_x = log_det(_as_case_pd(arr, case, "X"))
        if params.kind == "type1":
            ld_other = log_det(_as_case_pd(eye - arr, case, "I - X"))
        else:
            ld_other = log_det(_as_case_pd(eye + arr, case, "I + X"))
    except DomainViolation:
        if checked:
            raise
        return -np.inf
    norm = log_beta_p(p, a, b, case)
    if params.kind == "type1":
        return -norm + (a - h) * ld_x + (b - h) * ld_other
    return -norm + (a - h) * ld_x - (a + b) * ld_other
