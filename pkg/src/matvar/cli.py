"""Command-line entry point: ``matvar eval | reduce | sample | verify``.

Exit status: 0 on success, 1 when a verification check fails, 2 on usage,
configuration or domain errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass

from . import __version__
from .densities import MatrixBetaParams
from .errors import GammaDomainError, InvalidSchedule, MatvarError
from .gammafn import log_beta_p, log_mvgamma
from .matcore import matrix_to_json
from .reduction import reduce
from .samplers import RngStream, sample_beta_matrices, sample_gamma_matrices
from .verify import DEFAULT_CONFIG, family_name, reports_to_json, run_suite

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
LINEAR_MAX_LOG = 700.0


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    p: int | None = None
    alpha: float | None = None
    beta: float | None = None
    case: str = "real"
    family: str | None = None
    schedule: tuple | None = None
    seed: int = 0
    n_samples: int | None = None
    output_path: str | None = None
    format: str = "text"

    @classmethod
    def from_args(cls, ns) -> "CliConfig":
        cfg = cls(
            subcommand=ns.command,
            p=getattr(ns, "p", None),
            alpha=getattr(ns, "alpha", None),
            beta=getattr(ns, "beta", None),
            case=getattr(ns, "case", "real"),
            family=getattr(ns, "family", None),
            schedule=_parse_schedule(getattr(ns, "schedule", None)),
            seed=getattr(ns, "seed", 0) or 0,
            n_samples=getattr(ns, "n", None),
            output_path=getattr(ns, "output", None),
            format=getattr(ns, "format", "text"),
        )
        cfg.validate(ns)
        return cfg

    def validate(self, ns):
        need = {
            "eval": ("family", "p", "alpha"),
            "reduce": ("family", "p"),
            "sample": ("family", "p", "alpha", "n_samples"),
        }.get(self.subcommand, ())
        if self.subcommand == "verify" and not (ns.default or ns.config):
            need = ("family", "p", "alpha")
        for name in need:
            if getattr(self, name) is None:
                raise UsageError(f"{self.subcommand}: --{_flag(name)} is required")
        fam = self.family
        if fam in ("beta1", "beta2") and self.subcommand != "reduce" and self.beta is None:
            raise UsageError(f"{self.subcommand}: --beta is required for family {fam}")
        if self.p is not None and self.p < 1:
            raise UsageError("--p must be a positive integer")
        if self.n_samples is not None and self.n_samples < 0:
            raise UsageError("--n must be non-negative")


def _flag(name):
    return {"n_samples": "n"}.get(name, name)


def _parse_schedule(text):
    if text is None:
        return None
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--schedule must be comma-separated integers, got {text!r}") from None


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _fmt_bound(exc: GammaDomainError, p: int) -> str:
    rule = "(p-1)/2" if exc.case == "real" else "p-1"
    return (f"{exc.what}={exc.actual:g} is outside the domain: it must exceed "
            f"{rule} = {exc.required_bound:g} for p={p} ({exc.case} case)")


def cmd_eval(cfg: CliConfig) -> int:
    if cfg.family == "gamma":
        log_value = log_mvgamma(cfg.p, cfg.alpha, cfg.case)
        name = ("Gamma_p" if cfg.case == "real" else "ComplexGamma_p")
    else:
        log_value = log_beta_p(cfg.p, cfg.alpha, cfg.beta, cfg.case)
        name = ("B_p" if cfg.case == "real" else "ComplexB_p")
    linear = math.exp(log_value) if log_value <= LINEAR_MAX_LOG else None
    out = {
        "function": name,
        "family": cfg.family,
        "case": cfg.case,
        "p": cfg.p,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "log_value": log_value,
        "linear_value": linear,
    }
    with _output(cfg.output_path) as fh:
        if cfg.format == "json":
            fh.write(json.dumps(out) + "\n")
        else:
            args = f"{cfg.alpha:g}" if cfg.beta is None else f"{cfg.alpha:g}, {cfg.beta:g}"
            fh.write(f"log {name}[p={cfg.p}]({args}) = {log_value!r}\n")
            if linear is None:
                fh.write("linear value: not representable (overflow)\n")
            else:
                fh.write(f"linear {name}[p={cfg.p}]({args}) = {linear!r}\n")
    return EXIT_OK


def cmd_reduce(cfg: CliConfig, method: str = "auto", audit: bool = False) -> int:
    fam = family_name(cfg.family, cfg.case)
    if fam == "beta2_complex":
        raise UsageError("no trace is produced for the complex type-2 beta integral; "
                         "its value equals the complex type-1 ledger (use --family beta1)")
    trace = reduce(fam, cfg.p, cfg.schedule, method)
    with _output(cfg.output_path) as fh:
        if cfg.format == "json":
            fh.write(json.dumps(trace.to_json(audit), indent=2) + "\n")
        else:
            fh.write(trace.to_text(audit) + "\n")
    return EXIT_OK


def cmd_sample(cfg: CliConfig, stream_id: int = 0) -> int:
    rng = RngStream(cfg.seed, stream_id)
    n = cfg.n_samples
    if cfg.family == "gamma":
        draws = sample_gamma_matrices(cfg.p, cfg.alpha, cfg.case, rng, n) if n else []
    else:
        kind = "type1" if cfg.family == "beta1" else "type2"
        params = MatrixBetaParams(cfg.p, cfg.alpha, cfg.beta, kind, cfg.case)
        draws = sample_beta_matrices(params, rng, n) if n else []
    header = {
        "matvar_version": __version__,
        "family": cfg.family,
        "case": cfg.case,
        "p": cfg.p,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "n": n,
        "seed": cfg.seed,
        "stream_id": stream_id,
    }
    with _output(cfg.output_path) as fh:
        fh.write(json.dumps(header) + "\n")
        for X in draws:
            fh.write(json.dumps(matrix_to_json(X)) + "\n")
    return EXIT_OK


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(config, dict) or not isinstance(config.get("checks", []), list):
        raise UsageError(f"config {path} must be an object with a 'checks' list")
    return config


def cmd_verify(cfg: CliConfig, ns) -> int:
    if ns.config:
        config = _load_config(ns.config)
    elif ns.default:
        config = DEFAULT_CONFIG
    else:
        check = {"family": family_name(cfg.family, cfg.case), "p": cfg.p, "alpha": cfg.alpha}
        if cfg.beta is not None:
            check["beta"] = cfg.beta
        if ns.oracle:
            check["oracle"] = ns.oracle
        if cfg.n_samples is not None:
            check["n"] = cfg.n_samples
        check["seed"] = cfg.seed
        config = {"checks": [check]}
    try:
        reports = run_suite(config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with _output(cfg.output_path) as fh:
        if cfg.format == "json":
            fh.write(reports_to_json(reports) + "\n")
        else:
            for r in reports:
                fh.write(_report_line(r) + "\n")
            n_ok = sum(r.passed for r in reports)
            fh.write(f"{n_ok}/{len(reports)} checks passed\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def _report_line(r) -> str:
    params = " ".join(f"{k}={v:g}" for k, v in r.parameters.items())
    head = f"[{'PASS' if r.passed else 'FAIL'}] {r.family} p={r.p} {params} oracle={r.oracle}"
    if r.error:
        return f"{head}  error: {r.error}"
    tail = f"  log closed={r.closed_form_log:.10f} log oracle={r.oracle_log:.10f}"
    if r.oracle == "mc":
        tail += f" se={r.std_error:.2e} |z|={r.discrepancy_sigma:.2f}"
    else:
        tail += f" rel_error={r.rel_error:.2e}"
    return head + tail


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matvar",
        description="Matrix-variate gamma and beta integrals: evaluate, reduce, sample, verify.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, families, need_params=True):
        sp.add_argument("--family", choices=families)
        sp.add_argument("--case", choices=("real", "complex"), default="real")
        sp.add_argument("--p", type=int)
        if need_params:
            sp.add_argument("--alpha", type=float)
            sp.add_argument("--beta", type=float)
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--output", "-o", help="write to this file instead of stdout")

    sp = sub.add_parser("eval", help="log (and linear) multivariate gamma / beta values")
    common(sp, ("gamma", "beta1", "beta2"))

    sp = sub.add_parser("reduce", help="exact partitioned-matrix reduction trace")
    common(sp, ("gamma", "beta1", "beta2"), need_params=False)
    sp.add_argument("--schedule", help="block sizes, leading block first, e.g. 3,2")
    sp.add_argument("--method", choices=("auto", "stiefel", "gaussian"), default="auto")
    sp.add_argument("--audit", action="store_true", help="show uncancelled per-integral factors")

    sp = sub.add_parser("sample", help="draw matrices as JSON lines")
    common(sp, ("gamma", "beta1", "beta2"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream-id", type=int, default=0)

    sp = sub.add_parser("verify", help="check closed forms against numerical oracles")
    common(sp, ("gamma", "beta1", "beta2"))
    sp.add_argument("--default", action="store_true", help="run the built-in suite")
    sp.add_argument("--config", help="JSON suite config")
    sp.add_argument("--oracle", choices=("quadrature", "mc"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = CliConfig.from_args(ns)
        if cfg.subcommand == "eval":
            return cmd_eval(cfg)
        if cfg.subcommand == "reduce":
            return cmd_reduce(cfg, ns.method, ns.audit)
        if cfg.subcommand == "sample":
            return cmd_sample(cfg, ns.stream_id)
        return cmd_verify(cfg, ns)
    except GammaDomainError as exc:
        print(f"matvar: error: {_fmt_bound(exc, cfg.p)}", file=sys.stderr)
    except (UsageError, InvalidSchedule) as exc:
        print(f"matvar: error: {exc}", file=sys.stderr)
    except (MatvarError, ValueError) as exc:
        print(f"matvar: error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
