"""Validated positive-definite matrices, triangular factors and Schur complements.

Matrices here are small and dense.  Real matrices are ``float64`` arrays and
complex ones ``complex128`` arrays; on the wire (see :func:`matrix_to_json`)
complex entries travel as ``[re, im]`` pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite, NotSymmetric

__all__ = [
    "SYM_TOL",
    "PIVOT_TOL",
    "SpdMatrix",
    "HpdMatrix",
    "LowerTriangular",
    "Partition",
    "as_array",
    "case_of",
    "positive_definite",
    "cholesky",
    "schur_complement",
    "log_det",
    "hermitian_form",
    "triangular_jacobian_log",
    "matrix_to_json",
    "matrix_from_json",
]

SYM_TOL = 1e-12
PIVOT_TOL = 1e-12


def as_array(X) -> np.ndarray:
    if isinstance(X, (SpdMatrix, HpdMatrix, LowerTriangular)):
        return X.entries
    return np.asarray(X)


def case_of(X) -> str:
    a = as_array(X)
    return "complex" if np.iscomplexobj(a) else "real"


def _symmetrize(a: np.ndarray, tol: float) -> np.ndarray:
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    adj = a.conj().T
    scale = max(np.abs(a).max(), np.finfo(float).tiny)
    deviation = np.abs(a - adj).max() / scale
    if deviation > tol:
        raise NotSymmetric(deviation, tol)
    return 0.5 * (a + adj)


def _factor(a: np.ndarray) -> np.ndarray:
    """Cholesky factor of an already-symmetrized matrix, with the pivot check."""
    diag = np.real(np.diag(a))
    dmax = np.abs(diag).max()
    if not np.all(diag > 0):
        raise NotPositiveDefinite("diagonal entries must be strictly positive")
    try:
        L = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    pivots = np.real(np.diag(L)) ** 2
    if not np.all(pivots > PIVOT_TOL * dmax):
        j = int(np.argmin(pivots))
        raise NotPositiveDefinite(
            f"pivot {j} is {pivots[j]:.3e}, below {PIVOT_TOL:g} x max diagonal {dmax:.3e}"
        )
    return L


class _PDMatrix:
    case = "real"
    _dtype = np.float64

    def __init__(self, entries, sym_tol: float = SYM_TOL):
        a = np.array(entries, dtype=self._dtype)
        a = _symmetrize(a, sym_tol)
        if self.case == "complex":
            a[np.diag_indices_from(a)] = np.real(np.diag(a))
        self._chol = _factor(a)
        a.setflags(write=False)
        self.entries = a

    @property
    def p(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"{type(self).__name__}({self.entries.tolist()!r})"

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None


class SpdMatrix(_PDMatrix):
    """Real symmetric positive-definite matrix.

    The input must be symmetric to ``sym_tol`` relative to its largest
    entry; it is then averaged with its transpose and factorized.
    Construction fails with :class:`NotPositiveDefinite` when a Cholesky
    pivot falls below ``1e-12`` times the largest diagonal entry.
    """

    case = "real"
    _dtype = np.float64


class HpdMatrix(_PDMatrix):
    """Complex Hermitian positive-definite matrix (diagonal forced real)."""

    case = "complex"
    _dtype = np.complex128


def positive_definite(X, case: str | None = None):
    """Wrap `X` as an :class:`SpdMatrix` or :class:`HpdMatrix`."""
    if isinstance(X, (SpdMatrix, HpdMatrix)):
        if case is not None and X.case != case:
            raise ValueError(f"expected a {case} matrix, got {X.case}")
        return X
    case = case or case_of(X)
    return HpdMatrix(X) if case == "complex" else SpdMatrix(X)


@dataclass(frozen=True, eq=False)
class LowerTriangular:
    """Lower-triangular factor with a strictly positive real diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        t = self.entries
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("triangular factor must be square")
        if np.any(np.triu(t, 1) != 0):
            raise ValueError("strictly upper entries must be zero")
        d = np.diag(t)
        if np.any(np.imag(d) != 0) or not np.all(np.real(d) > 0):
            raise ValueError("diagonal must be real and strictly positive")

    @property
    def p(self) -> int:
        return self.entries.shape[0]

    @property
    def case(self) -> str:
        return case_of(self.entries)

    @property
    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.entries)).copy()

    def product(self) -> np.ndarray:
        """Return ``T T'`` (or ``T T*``)."""
        t = self.entries
        return t @ t.conj().T


# Complex factors share the class; the name is kept for symmetry with the types.
LowerTriangularComplex = LowerTriangular


def cholesky(X) -> LowerTriangular:
    """Lower-triangular ``T`` with positive diagonal such that ``X = T T*``."""
    X = positive_definite(X)
    return LowerTriangular(np.tril(X._chol))


@dataclass(frozen=True, eq=False)
class Partition:
    """Two-block partition of a p x p matrix, leading block of size ``p1``."""

    p1: int
    p2: int
    X11: np.ndarray
    X12: np.ndarray
    X21: np.ndarray
    X22: np.ndarray

    @classmethod
    def of(cls, X, p1: int) -> "Partition":
        a = as_array(X)
        p = a.shape[0]
        if not 0 < p1 < p:
            raise ValueError(f"p1 must satisfy 0 < p1 < {p}, got {p1}")
        return cls(p1, p - p1, a[:p1, :p1], a[:p1, p1:], a[p1:, :p1], a[p1:, p1:])

    @property
    def p(self) -> int:
        return self.p1 + self.p2


def schur_complement(part: Partition, which: str = "on_X11") -> np.ndarray:
    """Schur complement of a partitioned positive-definite matrix.

    ``which="on_X11"`` pivots on the leading block and returns
    ``X22 - X21 X11^{-1} X12``; ``which="on_X22"`` returns
    ``X11 - X12 X22^{-1} X21``.
    """
    if which == "on_X11":
        pivot, a, b, c = part.X11, part.X22, part.X21, part.X12
    elif which == "on_X22":
        pivot, a, b, c = part.X22, part.X11, part.X12, part.X21
    else:
        raise ValueError(f"which must be 'on_X11' or 'on_X22', got {which!r}")
    L = cholesky(pivot).entries
    # b P^{-1} c with P = L L*, via two triangular solves
    left = np.linalg.solve(L, b.conj().T)
    right = np.linalg.solve(L, c)
    s = a - left.conj().T @ right
    return 0.5 * (s + s.conj().T)


def log_det(X) -> float:
    """Log of the (absolute) determinant of a positive-definite matrix."""
    X = positive_definite(X)
    return 2.0 * float(np.sum(np.log(np.real(np.diag(X._chol)))))


def hermitian_form(row, M):
    """``row M^{-1} row*`` for a row vector and a positive-definite ``M``.

    Returned as given by the arithmetic (complex dtype for complex input) so
    callers can inspect the imaginary round-off.
    """
    row = np.atleast_2d(np.asarray(row))
    L = cholesky(M).entries
    z = np.linalg.solve(L, row.conj().T)
    return (z.conj().T @ z)[0, 0] if np.iscomplexobj(z) else float((z.T @ z)[0, 0])


def triangular_jacobian_log(T, case: str | None = None) -> float:
    """Log Jacobian of ``X = T T'`` (real) or ``X = T T*`` (complex).

    Real: ``2^p prod_j t_jj^(p+1-j)``.  Complex: ``2^p prod_j t_jj^(2(p-j)+1)``.
    """
    if not isinstance(T, LowerTriangular):
        T = LowerTriangular(np.asarray(T))
    case = case or T.case
    p = T.p
    j = np.arange(1, p + 1)
    if case == "real":
        powers = p + 1 - j
    elif case == "complex":
        powers = 2 * (p - j) + 1
    else:
        raise ValueError(f"unknown case {case!r}")
    return p * math.log(2.0) + float(np.sum(powers * np.log(T.diagonal)))


def matrix_to_json(X) -> dict:
    a = as_array(X)
    case = case_of(a)
    if case == "complex":
        entries = [[[float(z.real), float(z.imag)] for z in row] for row in a]
    else:
        entries = [[float(x) for x in row] for row in a]
    return {"p": int(a.shape[0]), "case": case, "entries": entries}


def matrix_from_json(obj: dict) -> np.ndarray:
    """Decode the matrix schema into an array (no positivity check)."""
    p = int(obj["p"])
    case = obj.get("case", "real")
    raw = obj["entries"]
    if case == "complex":
        a = np.array([[complex(re, im) for re, im in row] for row in raw], dtype=np.complex128)
    elif case == "real":
        a = np.array(raw, dtype=np.float64)
    else:
        raise ValueError(f"unknown case {case!r}")
    if a.shape != (p, p):
        raise ValueError(f"entries have shape {a.shape}, expected ({p}, {p})")
    return a
