"""Numerical oracles for the matrix-variate gamma and beta integrals.

Two independent routes are offered:

* deterministic nested quadrature in the original matrix entries for
  ``p <= 2``, with the cone or ``O < X < I`` constraints expressed as entry
  limits;
* importance-sampled Monte Carlo in triangular coordinates ``X = T T*`` for
  ``p <= 4``.

Neither route calls :mod:`matvar.gammafn` except to produce the closed form
a report compares against.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, special

from .errors import DegenerateWeights, MatvarError, QuadratureNonConvergence
from .gammafn import check_domain, log_beta_p, log_mvgamma
from .samplers import RngStream

__all__ = [
    "McEstimate",
    "ProposalConfig",
    "VerifyReport",
    "family_name",
    "quadrature_gamma",
    "quadrature_beta1",
    "quadrature_beta2",
    "mc_integral",
    "closed_form_log",
    "run_check",
    "run_suite",
    "DEFAULT_CONFIG",
]

MC_FAMILIES = ("gamma_real", "gamma_complex", "beta1_real", "beta1_complex")
QUAD_REL_TOL = 1e-4
MC_SIGMAS = 4.0
MC_MAX_STD_ERROR = 0.02
SHARD_SIZE = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    """A log-scale integral estimate.

    For Monte Carlo, ``std_error`` is the delta-method standard error of the
    log estimate.  For quadrature it is the relative difference between the
    last two refinement levels and ``seed`` is ``None``.
    """

    value: float
    std_error: float
    n_samples: int
    seed: int | None = None
    stream_id: int | None = None
    ess: float | None = None
    method: str = "mc"


def family_name(family: str, case: str | None = None) -> str:
    """Canonical family name, e.g. ``("gamma", "real") -> "gamma_real"``."""
    if family in ("gamma", "beta1", "beta2"):
        return f"{family}_{case or 'real'}"
    if family == "beta":
        return f"beta1_{case or 'real'}"
    return family


def closed_form_log(family: str, p: int, alpha: float, beta: float | None = None) -> float:
    fam = family_name(family)
    case = "complex" if fam.endswith("complex") else "real"
    if fam.startswith("gamma"):
        return log_mvgamma(p, alpha, case)
    if beta is None:
        raise ValueError(f"{fam} needs beta")
    return log_beta_p(p, alpha, beta, case)


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------


def _quad(f, a, b, tol, **kw):
    val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=tol, limit=200, **kw)
    return val


def _half_line(f, tol):
    """``∫_0^∞ f(x) dx`` through ``x = t / (1 - t)``, ``dx = dt / (1 - t)^2``."""

    def g(t):
        if t >= 1.0:
            return 0.0
        s = 1.0 - t
        return f(t / s) / (s * s)

    return _quad(g, 0.0, 1.0, tol)


def _alg(f_const, lo, hi, a, b, tol):
    """``∫_lo^hi (x-lo)^a (hi-x)^b dx`` times a constant, by weighted quadrature."""
    if hi <= lo:
        return 0.0
    return f_const * _quad(lambda x: 1.0, lo, hi, tol, weight="alg", wvar=(a, b))


def _refine(name, evaluate):
    """Run a nested rule at tightening tolerances until two levels agree to 1e-6."""
    levels = (1e-6, 1e-8, 1e-10)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        prev = evaluate(levels[0])
        for tol in levels[1:]:
            cur = evaluate(tol)
            if not (cur > 0 and math.isfinite(cur)):
                raise QuadratureNonConvergence(f"{name}: non-positive estimate {cur!r}")
            diff = abs(cur - prev) / abs(cur)
            if diff < 1e-6:
                return McEstimate(math.log(cur), max(diff, np.finfo(float).eps), 0, method="quadrature")
            prev = cur
    raise QuadratureNonConvergence(f"{name}: refinement stalled at relative change {diff:.2e}")


def quadrature_gamma(p: int, alpha: float, case: str = "real") -> McEstimate:
    """``log ∫_{X>O} |X|^(α-h) e^{-tr X} dX`` by nested quadrature, ``p <= 2``.

    The off-diagonal entry ranges over ``|x12|^2 < x11 x22`` and the
    diagonal entries over mapped half-lines.  The complex case integrates
    the real and imaginary parts of ``x12`` separately.
    """
    if p not in (1, 2):
        raise ValueError("quadrature is limited to p in {1, 2}")
    check_domain(p, alpha, case)
    if p == 1:
        ev = lambda tol: _half_line(lambda x: x ** (alpha - 1.0) * math.exp(-x), tol)  # noqa: E731
        return _refine("gamma p=1", ev)
    if case == "real":
        a = alpha - 1.5

        def ev(tol):
            def over_x22(x11, x22):
                c = math.sqrt(x11 * x22)
                return math.exp(-x11 - x22) * _alg(1.0, -c, c, a, a, tol)

            return _half_line(lambda x11: _half_line(lambda x22: over_x22(x11, x22), tol), tol)

        return _refine("gamma_real p=2", ev)

    a = alpha - 2.0

    def ev(tol):
        def over_x22(x11, x22):
            c = math.sqrt(x11 * x22)

            def over_re(u):
                r = math.sqrt(max(c * c - u * u, 0.0))
                return _alg(1.0, -r, r, a, a, tol)

            return math.exp(-x11 - x22) * _quad(over_re, -c, c, tol)

        return _half_line(lambda x11: _half_line(lambda x22: over_x22(x11, x22), tol), tol)

    return _refine("gamma_complex p=2", ev)


def quadrature_beta1(p: int, alpha: float, beta: float, case: str = "real") -> McEstimate:
    """``log ∫_{O<X<I} |X|^(α-h) |I-X|^(β-h) dX`` by nested quadrature, ``p <= 2``.

    For ``p = 2``, ``x22`` runs between ``|x12|^2 / x11`` and
    ``1 - |x12|^2 / (1 - x11)``; the interval is non-empty exactly when
    ``|x12|^2 < x11 (1 - x11)``.
    """
    if p not in (1, 2):
        raise ValueError("quadrature is limited to p in {1, 2}")
    check_domain(p, alpha, case, "alpha")
    check_domain(p, beta, case, "beta")
    if p == 1:
        ev = lambda tol: _alg(1.0, 0.0, 1.0, alpha - 1.0, beta - 1.0, tol)  # noqa: E731
        return _refine("beta1 p=1", ev)
    h = 1.5 if case == "real" else 2.0
    a, b = alpha - h, beta - h

    def inner(x11, q, tol):
        # x11 x22 - q = x11 (x22 - lo);  (1-x11)(1-x22) - q = (1-x11)(hi - x22)
        lo = q / x11
        hi = 1.0 - q / (1.0 - x11)
        return _alg(x11 ** a * (1.0 - x11) ** b, lo, hi, a, b, tol)

    if case == "real":

        def ev(tol):
            def over_x11(x11):
                R = math.sqrt(x11 * (1.0 - x11))
                return _quad(lambda x12: inner(x11, x12 * x12, tol), -R, R, tol)

            return _quad(over_x11, 0.0, 1.0, tol)

        return _refine("beta1_real p=2", ev)

    def ev(tol):
        def over_x11(x11):
            R = math.sqrt(x11 * (1.0 - x11))

            def over_re(u):
                r = math.sqrt(max(R * R - u * u, 0.0))
                return _quad(lambda v: inner(x11, u * u + v * v, tol), -r, r, tol)

            return _quad(over_re, -R, R, tol)

        return _quad(over_x11, 0.0, 1.0, tol)

    return _refine("beta1_complex p=2", ev)


def quadrature_beta2(p: int, alpha: float, beta: float) -> McEstimate:
    """Real type-2 integral ``log ∫_{X>O} |X|^(α-h) |I+X|^-(α+β) dX``, ``p <= 2``."""
    if p not in (1, 2):
        raise ValueError("quadrature is limited to p in {1, 2}")
    check_domain(p, alpha, "real", "alpha")
    check_domain(p, beta, "real", "beta")
    s = alpha + beta
    if p == 1:
        ev = lambda tol: _half_line(lambda x: x ** (alpha - 1.0) * (1.0 + x) ** -s, tol)  # noqa: E731
        return _refine("beta2 p=1", ev)
    a = alpha - 1.5

    def ev(tol):
        def over_x22(x11, x22):
            c = math.sqrt(x11 * x22)
            k = (1.0 + x11) * (1.0 + x22)
            f = lambda x12: (k - x12 * x12) ** -s  # noqa: E731
            return _quad(f, -c, c, tol, weight="alg", wvar=(a, a))

        return _half_line(lambda x11: _half_line(lambda x22: over_x22(x11, x22), tol), tol)

    return _refine("beta2_real p=2", ev)


# --------------------------------------------------------------------------
# Monte Carlo
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ProposalConfig:
    """Importance proposal in triangular coordinates.

    Gamma families: ``t_jj^2 ~ Gamma(k_j + shift_j)`` where ``k_j`` is the
    integrand's own shape and ``shift_j = min(shape_shift, k_j / 2)`` keeps
    the weight variance finite; off-diagonal components are ``N(0, s/2)``
    with ``s = variance_inflation``.

    Beta families: ``t_jj^2 ~ Beta(k_j, beta_shape)`` and off-diagonal
    components ``N(0, s / (2 (alpha + beta)))``.
    """

    shape_shift: float = 0.5
    variance_inflation: float = 1.5
    beta_shape: float = 1.0


def _mc_shard(family, p, alpha, beta, rng: RngStream, n, proposal: ProposalConfig):
    """Return ``(n, logsumexp(lw), logsumexp(2 lw))`` for one shard."""
    g = rng.generator
    real = family.endswith("real")
    step = 0.5 if real else 1.0
    k = alpha - step * np.arange(p)                      # implied diagonal shapes
    j = np.arange(1, p + 1)
    jac_pow = (p + 1 - j) if real else (2 * (p - j) + 1)
    is_gamma = family.startswith("gamma")

    # diagonal: s = t^2 with proposal density q_s, so q_t(t) = 2 t q_s(t^2)
    if is_gamma:
        shape = k + np.minimum(proposal.shape_shift, k / 2)
        s = g.standard_gamma(shape, size=(n, p))
        log_qs = (shape - 1) * np.log(s) - s - special.gammaln(shape)
        var = 0.5 * proposal.variance_inflation
    else:
        shape = k
        s = g.beta(shape, proposal.beta_shape, size=(n, p))
        log_qs = ((shape - 1) * np.log(s) + (proposal.beta_shape - 1) * np.log1p(-s)
                  - special.betaln(shape, proposal.beta_shape))
        var = 0.5 * proposal.variance_inflation / (alpha + beta)
    t = np.sqrt(s)
    log_q = np.sum(log_qs + np.log(2 * t), axis=1)

    rows, cols = np.tril_indices(p, -1)
    n_off = rows.size if real else 2 * rows.size
    z = g.normal(0.0, math.sqrt(var), size=(n, n_off))
    log_q += np.sum(-0.5 * z * z / var - 0.5 * math.log(2 * math.pi * var), axis=1)

    # log |X| = sum log t_jj^2; Jacobian 2^p prod t_jj^power
    log_det_x = np.sum(np.log(s), axis=1)
    log_jac = p * math.log(2.0) + np.sum(jac_pow * np.log(t), axis=1)
    h = (p + 1) / 2 if real else float(p)

    if is_gamma:
        trace = np.sum(s, axis=1) + np.sum(z * z, axis=1)
        log_f = (alpha - h) * log_det_x - trace
    else:
        if real:
            T = np.zeros((n, p, p))
            T[:, rows, cols] = z
        else:
            T = np.zeros((n, p, p), dtype=np.complex128)
            m = rows.size
            T[:, rows, cols] = z[:, :m] + 1j * z[:, m:]
        T[:, np.arange(p), np.arange(p)] = t
        X = T @ np.conj(np.swapaxes(T, -1, -2))
        ev = np.linalg.eigvalsh(np.eye(p) - X)
        inside = np.all(ev > 0, axis=1)
        log_det_c = np.where(inside, np.sum(np.log(np.where(ev > 0, ev, 1.0)), axis=1), 0.0)
        log_f = np.where(inside, (alpha - h) * log_det_x + (beta - h) * log_det_c, -np.inf)

    lw = log_f + log_jac - log_q
    return n, float(special.logsumexp(lw)), float(special.logsumexp(2 * lw))


def _workers(workers):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("MATVAR_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def mc_integral(family: str, p: int, alpha: float, beta: float | None = None, n: int = 10**6,
                rng: RngStream | None = None, proposal: ProposalConfig | None = None,
                shard_size: int = SHARD_SIZE, workers: int | None = None) -> McEstimate:
    """Importance-sampling estimate of a gamma or type-1 beta integral.

    The ``n`` draws are split into fixed shards of ``shard_size``; shard ``i``
    uses ``rng.child(i)``.  The merged result depends only on the shard plan,
    not on how many worker threads ran it.

    Raises
    ------
    DegenerateWeights
        If the effective sample size falls below 1% of `n`.
    """
    fam = family_name(family)
    if fam not in MC_FAMILIES:
        raise ValueError(f"Monte Carlo supports {MC_FAMILIES}, got {family!r}")
    if not 1 <= p <= 4:
        raise ValueError("Monte Carlo verification is limited to p <= 4")
    if n < 10_000:
        raise ValueError("n must be at least 10^4")
    case = "complex" if fam.endswith("complex") else "real"
    check_domain(p, alpha, case, "alpha")
    if fam.startswith("beta"):
        if beta is None:
            raise ValueError(f"{fam} needs beta")
        check_domain(p, beta, case, "beta")
    rng = rng if rng is not None else RngStream(0)
    proposal = proposal or ProposalConfig()

    sizes = [shard_size] * (n // shard_size)
    if n % shard_size:
        sizes.append(n % shard_size)
    jobs = [(fam, p, alpha, beta, rng.child(i), m, proposal) for i, m in enumerate(sizes)]
    nw = min(_workers(workers), len(jobs))
    if nw == 1:
        parts = [_mc_shard(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            parts = list(pool.map(lambda job: _mc_shard(*job), jobs))

    l1 = float(special.logsumexp([part[1] for part in parts]))
    l2 = float(special.logsumexp([part[2] for part in parts]))
    log_mean = l1 - math.log(n)
    # relative variance of w: E[w^2] / E[w]^2 - 1, with Bessel's correction
    ratio = math.exp(l2 - 2 * l1) * n
    rel_var = max(ratio - 1.0, 0.0) * n / (n - 1)
    ess = math.exp(2 * l1 - l2) if math.isfinite(l2) else 0.0
    if not ess >= 0.01 * n:
        raise DegenerateWeights(ess, n)
    std_error = math.sqrt(rel_var / n)
    return McEstimate(log_mean, std_error, n, rng.seed, rng.stream_id, ess, "mc")


# --------------------------------------------------------------------------
# suite
# --------------------------------------------------------------------------


@dataclass
class VerifyReport:
    family: str
    p: int
    parameters: dict
    oracle: str
    closed_form_log: float | None = None
    oracle_log: float | None = None
    std_error: float | None = None
    rel_error: float | None = None
    discrepancy_sigma: float | None = None
    n_samples: int | None = None
    seed: int | None = None
    passed: bool = False
    error: str | None = None

    def to_json(self) -> dict:
        return asdict(self)


def run_check(check: dict, workers: int | None = None) -> VerifyReport:
    """Run one check; domain and numerical errors are recorded, not raised."""
    fam = family_name(check["family"], check.get("case"))
    p = int(check["p"])
    alpha = float(check["alpha"])
    beta = None if check.get("beta") is None else float(check["beta"])
    oracle = check.get("oracle", "quadrature" if p <= 2 else "mc")
    params = {"alpha": alpha} if beta is None else {"alpha": alpha, "beta": beta}
    report = VerifyReport(fam, p, params, oracle)
    try:
        closed = closed_form_log(fam, p, alpha, beta)
        report.closed_form_log = closed
        if oracle == "quadrature":
            if fam in ("gamma_real", "gamma_complex"):
                est = quadrature_gamma(p, alpha, fam.split("_")[1])
            elif fam in ("beta1_real", "beta1_complex"):
                est = quadrature_beta1(p, alpha, beta, fam.split("_")[1])
            elif fam == "beta2_real":
                est = quadrature_beta2(p, alpha, beta)
            else:
                raise ValueError(f"no quadrature oracle for {fam}")
            report.oracle_log = est.value
            report.std_error = est.std_error
            report.rel_error = abs(math.expm1(est.value - closed))
            report.passed = report.rel_error <= float(check.get("rel_tol", QUAD_REL_TOL))
        elif oracle == "mc":
            seed = int(check.get("seed", 0))
            rng = RngStream(seed, int(check.get("stream_id", 0)))
            proposal = ProposalConfig(**check.get("proposal", {}))
            est = mc_integral(fam, p, alpha, beta, int(check.get("n", 10**6)), rng, proposal,
                              workers=workers)
            report.oracle_log = est.value
            report.std_error = est.std_error
            report.n_samples = est.n_samples
            report.seed = seed
            report.rel_error = abs(math.expm1(est.value - closed))
            report.discrepancy_sigma = abs(est.value - closed) / est.std_error
            max_se = float(check.get("max_std_error", MC_MAX_STD_ERROR))
            report.passed = report.discrepancy_sigma <= MC_SIGMAS and est.std_error <= max_se
        else:
            raise ValueError(f"unknown oracle {oracle!r}")
    except (MatvarError, ValueError) as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        report.passed = False
    return report


DEFAULT_CONFIG = {
    "checks": [
        {"family": "gamma_real", "p": 1, "alpha": 2.0, "oracle": "quadrature"},
        {"family": "gamma_real", "p": 2, "alpha": 1.5, "oracle": "quadrature"},
        {"family": "gamma_real", "p": 2, "alpha": 3.25, "oracle": "quadrature"},
        {"family": "beta1_real", "p": 1, "alpha": 2.0, "beta": 3.0, "oracle": "quadrature"},
        {"family": "beta1_real", "p": 2, "alpha": 2.0, "beta": 2.0, "oracle": "quadrature"},
        {"family": "beta1_real", "p": 2, "alpha": 2.5, "beta": 3.5, "oracle": "quadrature"},
        {"family": "gamma_real", "p": 3, "alpha": 3.0, "oracle": "mc", "n": 10**6, "seed": 11},
        {"family": "gamma_real", "p": 4, "alpha": 3.0, "oracle": "mc", "n": 10**6, "seed": 12},
        {"family": "gamma_complex", "p": 2, "alpha": 3.0, "oracle": "mc", "n": 10**6, "seed": 13},
        {"family": "gamma_complex", "p": 3, "alpha": 4.0, "oracle": "mc", "n": 10**6, "seed": 14},
        {"family": "gamma_complex", "p": 4, "alpha": 5.0, "oracle": "mc", "n": 10**6, "seed": 15},
        {"family": "beta1_real", "p": 3, "alpha": 3.0, "beta": 3.0, "oracle": "mc",
         "n": 10**6, "seed": 16},
    ]
}


def run_suite(config: dict | None = None, workers: int | None = None) -> list[VerifyReport]:
    """Run every check in ``config["checks"]`` (an empty config runs nothing)."""
    if config is None:
        config = DEFAULT_CONFIG
    if not isinstance(config, dict):
        raise ValueError("suite config must be a JSON object")
    checks = config.get("checks", [])
    if not isinstance(checks, list):
        raise ValueError("'checks' must be a list")
    for c in checks:
        if not isinstance(c, dict) or not {"family", "p", "alpha"} <= c.keys():
            raise ValueError(f"each check needs family, p and alpha: {c!r}")
    workers = workers if workers is not None else config.get("workers")
    return [run_check(c, workers) for c in checks]


def reports_to_json(reports: list[VerifyReport]) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2, sort_keys=True)
