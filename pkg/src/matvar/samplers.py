"""Exact samplers for matrix-variate gamma and beta distributions.

Gamma draws use the triangular (Bartlett) construction with unit scale:
``X = T T'`` where, for the real case, ``t_jj^2 ~ Gamma(alpha - (j-1)/2)`` and
``t_ij ~ N(0, 1/2)`` for ``i > j``.  The off-diagonal variance is 1/2, not 1,
because the kernel is ``exp(-t^2)``.  In the complex case ``t_jj^2 ~
Gamma(alpha - (j-1))`` and the real and imaginary parts of each off-diagonal
entry are independent ``N(0, 1/2)``.

Beta draws are built from two independent gamma draws.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .densities import MatrixBetaParams
from .gammafn import check_domain
from .matcore import positive_definite

__all__ = [
    "RngStream",
    "bartlett_factors",
    "sample_gamma_matrices",
    "sample_gamma_matrix",
    "sample_beta_matrices",
    "sample_beta_matrix",
    "BlockGaussianReport",
    "conditional_block_gaussian_check",
]

_U64 = 1 << 64
_HALF_SD = np.sqrt(0.5)


class RngStream:
    """A reproducible random stream keyed by ``(seed, stream_id)``.

    Streams with the same key produce bit-identical draws; distinct
    ``stream_id`` values map to independent ``SeedSequence`` children.
    """

    def __init__(self, seed: int, stream_id: int = 0, _path: tuple = ()):
        for name, v in (("seed", seed), ("stream_id", stream_id)):
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or not 0 <= v < _U64:
                raise ValueError(f"{name} must be an integer in [0, 2**64), got {v!r}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._path = tuple(_path)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,) + self._path)
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def child(self, index: int) -> "RngStream":
        """Independent sub-stream, e.g. for one Monte Carlo shard."""
        return RngStream(self.seed, self.stream_id, self._path + (int(index),))

    def __repr__(self):
        extra = f", path={self._path}" if self._path else ""
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}{extra})"


def _gen(rng):
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected an RngStream or numpy Generator, got {type(rng).__name__}")


def _hermitize(X):
    return 0.5 * (X + np.conj(np.swapaxes(X, -1, -2)))


def bartlett_factors(p: int, alpha: float, case: str, rng, n: int) -> np.ndarray:
    """``n`` lower-triangular factors, shape ``(n, p, p)``."""
    check_domain(p, alpha, case)
    g = _gen(rng)
    step = 0.5 if case == "real" else 1.0
    shapes = alpha - step * np.arange(p)
    diag = np.sqrt(g.standard_gamma(shapes, size=(n, p)))
    rows, cols = np.tril_indices(p, -1)
    if case == "real":
        T = np.zeros((n, p, p))
        T[:, rows, cols] = g.normal(0.0, _HALF_SD, size=(n, rows.size))
    else:
        T = np.zeros((n, p, p), dtype=np.complex128)
        re = g.normal(0.0, _HALF_SD, size=(n, rows.size))
        im = g.normal(0.0, _HALF_SD, size=(n, rows.size))
        T[:, rows, cols] = re + 1j * im
    idx = np.arange(p)
    T[:, idx, idx] = diag
    return T


def sample_gamma_matrices(p: int, alpha: float, case: str, rng, n: int) -> np.ndarray:
    """``n`` unit-scale matrix-variate gamma draws as an ``(n, p, p)`` array."""
    T = bartlett_factors(p, alpha, case, rng, n)
    return _hermitize(T @ np.conj(np.swapaxes(T, -1, -2)))


def sample_gamma_matrix(p: int, alpha: float, case: str, rng):
    """One draw, validated as an :class:`~matvar.matcore.SpdMatrix` or ``HpdMatrix``."""
    return positive_definite(sample_gamma_matrices(p, alpha, case, rng, 1)[0], case)


def _sandwich(L, M):
    """``L^{-1} M L^{-*}`` for stacked lower-triangular ``L`` and Hermitian ``M``."""
    Z = np.linalg.solve(L, M)
    return np.conj(np.swapaxes(np.linalg.solve(L, np.conj(np.swapaxes(Z, -1, -2))), -1, -2))


def sample_beta_matrices(params: MatrixBetaParams, rng, n: int) -> np.ndarray:
    """``n`` matrix beta draws.

    With independent ``A ~ gamma(alpha)`` and ``B ~ gamma(beta)`` and
    ``A + B = L L*``, the type-1 draw is ``U = L^{-1} A L^{-*}``.  The
    type-2 draw is ``V = (I - U)^{-1} - I = L* B^{-1} L - I``, which has
    the same law as ``B^{-1/2} A B^{-1/2}``.
    """
    p, case = params.p, params.case
    A = sample_gamma_matrices(p, params.alpha, case, rng, n)
    B = sample_gamma_matrices(p, params.beta, case, rng, n)
    L = np.linalg.cholesky(A + B)
    if params.kind == "type1":
        return _hermitize(_sandwich(L, A))
    W = np.linalg.solve(B, L)
    V = np.conj(np.swapaxes(L, -1, -2)) @ W - np.eye(p)
    return _hermitize(V)


def sample_beta_matrix(params: MatrixBetaParams, rng) -> np.ndarray:
    return sample_beta_matrices(params, rng, 1)[0]


@dataclass
class BlockGaussianReport:
    """Outcome of :func:`conditional_block_gaussian_check`.

    ``normality`` holds one ``(entry, ks_statistic, p_value)`` per entry of
    ``Y = X21 X11^{-1/2}``; ``independence`` holds ``(pair, correlation,
    p_value)`` rows.  Every p-value is compared against ``level`` divided by
    the number of tests.
    """

    p1: int
    p2: int
    alpha: float
    n_draws: int
    level: float
    normality: list = field(default_factory=list)
    independence: list = field(default_factory=list)

    @property
    def n_tests(self) -> int:
        return len(self.normality) + len(self.independence)

    @property
    def threshold(self) -> float:
        return self.level / max(self.n_tests, 1)

    @property
    def passed(self) -> bool:
        return all(row[2] > self.threshold for row in self.normality + self.independence)

    def to_json(self) -> dict:
        return {
            "p1": self.p1,
            "p2": self.p2,
            "alpha": self.alpha,
            "n_draws": self.n_draws,
            "level": self.level,
            "normality": [
                {"entry": list(e), "ks_statistic": s, "p_value": pv} for e, s, pv in self.normality
            ],
            "independence": [
                {"pair": name, "correlation": r, "p_value": pv} for name, r, pv in self.independence
            ],
            "passed": self.passed,
        }


def conditional_block_gaussian_check(p1: int, p2: int, alpha: float, n_draws: int, rng,
                                     level: float = 0.01) -> BlockGaussianReport:
    """Check the block structure of a real unit-scale gamma matrix.

    Given ``X11 = L L'``, ``Y = X21 L^{-T}`` should have i.i.d. ``N(0, 1/2)``
    entries independent of ``X11``; the Schur complement
    ``U = X22 - X21 X11^{-1} X12 = X22 - Y Y'`` and ``X22`` itself should be
    independent of ``X11``.
    """
    p = p1 + p2
    check_domain(p, alpha, "real")
    X = sample_gamma_matrices(p, alpha, "real", rng, n_draws)
    X11, X12, X22 = X[:, :p1, :p1], X[:, :p1, p1:], X[:, p1:, p1:]
    L = np.linalg.cholesky(X11)
    Y = np.swapaxes(np.linalg.solve(L, X12), -1, -2)  # (n, p2, p1)
    U = X22 - Y @ np.swapaxes(Y, -1, -2)

    report = BlockGaussianReport(p1, p2, float(alpha), int(n_draws), level)
    normal = stats.norm(0.0, _HALF_SD)
    for i in range(p2):
        for j in range(p1):
            res = stats.kstest(Y[:, i, j], normal.cdf)
            report.normality.append(((i, j), float(res.statistic), float(res.pvalue)))

    tr11 = np.trace(X11, axis1=1, axis2=2)
    pairs = {
        "tr(X11), tr(U)": (tr11, np.trace(U, axis1=1, axis2=2)),
        "tr(X11), tr(X22)": (tr11, np.trace(X22, axis1=1, axis2=2)),
        "log|X11|, log|U|": (np.linalg.slogdet(X11)[1], np.linalg.slogdet(U)[1]),
        "tr(X11), tr(YY')": (tr11, np.sum(Y * Y, axis=(1, 2))),
    }
    for name, (a, b) in pairs.items():
        res = stats.pearsonr(a, b)
        report.independence.append((name, float(res.statistic), float(res.pvalue)))
    return report
