"""Exact factor ledgers for partitioned-matrix evaluations of gamma and beta integrals.

Each reduction peels a trailing block (a single diagonal entry in the
one-at-a-time schedule) off the current leading submatrix, records the
substitutions used and the closed-form scalar integrals they unlock, and
multiplies the resulting gamma factors into a :class:`FactorLedger`.  The
ledgers are symbolic in ``alpha`` and ``beta``: every gamma argument is a base
(``alpha``, ``beta``, ``alpha_plus_beta`` or a pure number) plus an exact
half-integer offset, and every power of pi is an exact rational.

Nothing is integrated numerically here; :mod:`matvar.verify` does that.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import GammaDomainError, InvalidSchedule
from .gammafn import LOG_PI, HalfInt

__all__ = [
    "BASES",
    "FAMILIES",
    "SUBSTITUTIONS",
    "GammaFactor",
    "FactorLedger",
    "Integral",
    "ReductionStep",
    "ReductionTrace",
    "mvgamma_ledger",
    "closed_form_ledger",
    "reduce_gamma_real",
    "reduce_gamma_complex",
    "reduce_beta1",
    "reduce_beta2_real",
    "reduce",
    "ledger_to_log_value",
    "ledger_from_json",
    "compositions",
]

BASES = ("alpha", "beta", "alpha_plus_beta", "pure_number")
SIDES = ("numerator", "denominator")
FAMILIES = ("gamma_real", "gamma_complex", "beta1_real", "beta1_complex", "beta2_real")
SUBSTITUTIONS = (
    "schur_split",
    "y_shift",
    "u_ratio",
    "stiefel",
    "w_whiten",
    "gaussian_block",
    "u_shift_block",
)

_SYMBOL = {"alpha": "α", "beta": "β", "alpha_plus_beta": "α + β"}
_ZERO = HalfInt(0)


def _frac_json(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def _fmt_frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, order=True)
class GammaFactor:
    """One scalar gamma ``Γ(base + offset)`` on a given side of the ledger.

    For ``base == "pure_number"`` the offset *is* the argument, e.g. the
    ``Γ((m-1)/2)`` produced by integrating over directions.
    """

    base: str
    offset: HalfInt
    side: str = "numerator"

    def __post_init__(self):
        if self.base not in BASES:
            raise ValueError(f"unknown base {self.base!r}")
        if self.side not in SIDES:
            raise ValueError(f"unknown side {self.side!r}")

    def flipped(self) -> "GammaFactor":
        other = "denominator" if self.side == "numerator" else "numerator"
        return GammaFactor(self.base, self.offset, other)

    def argument(self, alpha: float | None = None, beta: float | None = None) -> float:
        if self.base == "pure_number":
            return float(self.offset)
        if self.base == "alpha":
            base = alpha
        elif self.base == "beta":
            base = beta
        else:
            base = None if alpha is None or beta is None else alpha + beta
        if base is None:
            raise ValueError(f"a value for {self.base} is required")
        return base + float(self.offset)

    def label(self) -> str:
        if self.base == "pure_number":
            return f"Γ({self.offset})"
        sym = _SYMBOL[self.base]
        t = self.offset.twice_value
        if t == 0:
            return f"Γ({sym})"
        sign = "+" if t > 0 else "−"
        return f"Γ({sym} {sign} {HalfInt(abs(t))})"

    def to_json(self) -> dict:
        return {"base": self.base, "twice_offset": self.offset.twice_value, "side": self.side}


def _sort_key(f: GammaFactor):
    return (SIDES.index(f.side), BASES.index(f.base), -f.offset.twice_value)


class FactorLedger:
    """Exact product ``pi^e * prod Γ(num) / prod Γ(den)``.

    Equality and hashing use the normalized form, in which identical
    numerator and denominator factors have been cancelled.  The raw
    (uncancelled) multiset is kept for audit output.
    """

    __slots__ = ("pi_exponent", "_factors")

    def __init__(self, pi_exponent=0, factors: Iterable[GammaFactor] = ()):
        e = Fraction(pi_exponent)
        if 4 % e.denominator:
            raise ValueError(f"pi exponent {e} must have a denominator dividing 4")
        self.pi_exponent = e
        self._factors = tuple(sorted(factors, key=_sort_key))

    @property
    def factors(self) -> tuple[GammaFactor, ...]:
        return self._factors

    @property
    def numerator(self) -> list[GammaFactor]:
        return [f for f in self._factors if f.side == "numerator"]

    @property
    def denominator(self) -> list[GammaFactor]:
        return [f for f in self._factors if f.side == "denominator"]

    def __mul__(self, other: "FactorLedger") -> "FactorLedger":
        if not isinstance(other, FactorLedger):
            return NotImplemented
        return FactorLedger(self.pi_exponent + other.pi_exponent,
                            self._factors + other._factors)

    def inverse(self) -> "FactorLedger":
        return FactorLedger(-self.pi_exponent, (f.flipped() for f in self._factors))

    def __truediv__(self, other: "FactorLedger") -> "FactorLedger":
        return self * other.inverse()

    def normalized(self) -> "FactorLedger":
        num = Counter((f.base, f.offset) for f in self.numerator)
        den = Counter((f.base, f.offset) for f in self.denominator)
        common = num & den
        num -= common
        den -= common
        out = [GammaFactor(b, o, "numerator") for b, o in num.elements()]
        out += [GammaFactor(b, o, "denominator") for b, o in den.elements()]
        return FactorLedger(self.pi_exponent, out)

    def cancelled(self) -> list[GammaFactor]:
        """Numerator factors that normalization removes against the denominator."""
        num = Counter((f.base, f.offset) for f in self.numerator)
        den = Counter((f.base, f.offset) for f in self.denominator)
        return [GammaFactor(b, o) for b, o in (num & den).elements()]

    def _key(self):
        n = self.normalized()
        return (n.pi_exponent, n._factors)

    def __eq__(self, other):
        if not isinstance(other, FactorLedger):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"FactorLedger({self})"

    def __str__(self):
        parts = []
        if self.pi_exponent:
            parts.append(f"π^{_fmt_frac(self.pi_exponent)}")
        parts += [f.label() for f in self.numerator]
        text = " ".join(parts) or "1"
        den = self.denominator
        if den:
            text += " / " + " ".join(f.label() for f in den)
        return text

    def to_json(self) -> dict:
        return {
            "pi_exponent": _frac_json(self.pi_exponent),
            "factors": [f.to_json() for f in self._factors],
        }


def ledger_from_json(obj: dict) -> FactorLedger:
    e = obj["pi_exponent"]
    return FactorLedger(
        Fraction(e["num"], e["den"]),
        [GammaFactor(f["base"], HalfInt(f["twice_offset"]), f["side"]) for f in obj["factors"]],
    )


def _gamma(base: str, twice_offset: int, side: str = "numerator") -> FactorLedger:
    return FactorLedger(0, [GammaFactor(base, HalfInt(twice_offset), side)])


def _pi(exponent) -> FactorLedger:
    return FactorLedger(exponent)


def mvgamma_ledger(q: int, base: str, twice_offset: int = 0, case: str = "real") -> FactorLedger:
    """``Γ_q(base + offset)`` (or its complex analogue) expanded into scalar gammas."""
    if case == "real":
        factors = [GammaFactor(base, HalfInt(twice_offset - j)) for j in range(q)]
        return FactorLedger(Fraction(q * (q - 1), 4), factors)
    if case == "complex":
        factors = [GammaFactor(base, HalfInt(twice_offset - 2 * j)) for j in range(q)]
        return FactorLedger(Fraction(q * (q - 1), 2), factors)
    raise ValueError(f"unknown case {case!r}")


def closed_form_ledger(family: str, p: int) -> FactorLedger:
    """The ledger of ``Γ_p(α)``, ``Γ̃_p(α)``, ``B_p(α, β)`` or ``B̃_p(α, β)``."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    case = "complex" if family.endswith("complex") else "real"
    if family.startswith("gamma"):
        return mvgamma_ledger(p, "alpha", 0, case)
    return (
        mvgamma_ledger(p, "alpha", 0, case)
        * mvgamma_ledger(p, "beta", 0, case)
        / mvgamma_ledger(p, "alpha_plus_beta", 0, case)
    )


def closed_form_name(family: str, p: int) -> str:
    tilde = "̃" if family.endswith("complex") else ""
    if family.startswith("gamma"):
        return f"Γ{tilde}_{p}(α)"
    return f"B{tilde}_{p}(α, β)"


def ledger_to_log_value(ledger: FactorLedger, alpha: float, beta: float | None = None) -> float:
    """Numeric log value of a ledger at the given ``alpha`` (and ``beta``).

    Raises
    ------
    GammaDomainError
        If any gamma argument is not strictly positive after substitution.
    """
    total = float(ledger.pi_exponent) * LOG_PI
    for f in ledger.normalized().factors:
        x = f.argument(alpha, beta)
        if not x > 0:
            if f.base == "pure_number":
                raise GammaDomainError(0.0, x, "real", "gamma argument")
            raise GammaDomainError(-float(f.offset), x - float(f.offset), "real", f.base)
        g = math.lgamma(x)
        total += g if f.side == "numerator" else -g
    return total


@dataclass(frozen=True)
class Integral:
    """A closed-form integral performed inside a step and the factors it yields."""

    variable: str
    detail: str
    ledger: FactorLedger

    def to_json(self) -> dict:
        return {"variable": self.variable, "detail": self.detail, "ledger": self.ledger.to_json()}


@dataclass(frozen=True)
class ReductionStep:
    """One peel of a trailing block off the current leading submatrix.

    ``raw`` is the uncancelled product of the step's integrals;
    ``contribution`` is its normalized form.  ``residual_exponent_shift`` is
    how much the remaining determinant exponent grows (``+1/2`` per step in
    the real one-at-a-time schedule).  ``conditions`` maps each base to the
    strict lower bound the step's integrals need.
    """

    step_index: int
    eliminated: str
    current_size: int
    block_size: int
    substitutions: tuple[tuple[str, str], ...]
    integrals: tuple[Integral, ...]
    residual_exponent_shift: HalfInt
    conditions: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        for name, _ in self.substitutions:
            if name not in SUBSTITUTIONS:
                raise ValueError(f"substitution {name!r} is not in the catalog")

    @property
    def raw(self) -> FactorLedger:
        out = FactorLedger()
        for integral in self.integrals:
            out = out * integral.ledger
        return out

    @property
    def contribution(self) -> FactorLedger:
        return self.raw.normalized()

    @property
    def substitution_names(self) -> list[str]:
        return [name for name, _ in self.substitutions]

    def to_json(self, audit: bool = False) -> dict:
        out = {
            "step_index": self.step_index,
            "eliminated": self.eliminated,
            "current_size": self.current_size,
            "block_size": self.block_size,
            "substitutions": [{"name": n, "detail": d} for n, d in self.substitutions],
            "contribution": self.contribution.to_json(),
            "residual_exponent_shift": _frac_json(self.residual_exponent_shift.value),
            "conditions": {k: _frac_json(v.value) for k, v in self.conditions.items()},
        }
        if self.notes:
            out["notes"] = list(self.notes)
        if audit:
            out["integrals"] = [i.to_json() for i in self.integrals]
            out["raw"] = self.raw.to_json()
            out["cancelled"] = [f.to_json() for f in self.raw.cancelled()]
        return out


@dataclass(frozen=True)
class ReductionTrace:
    family: str
    p: int
    schedule: tuple[int, ...]
    method: str
    steps: tuple[ReductionStep, ...]
    notes: tuple[str, ...] = ()

    @property
    def total(self) -> FactorLedger:
        out = FactorLedger()
        for step in self.steps:
            out = out * step.contribution
        return out.normalized()

    @property
    def closed_form(self) -> FactorLedger:
        return closed_form_ledger(self.family, self.p)

    @property
    def closed_form_name(self) -> str:
        return closed_form_name(self.family, self.p)

    @property
    def validity(self) -> dict:
        """Strongest condition over all steps, per base."""
        out: dict = {}
        for step in self.steps:
            for base, bound in step.conditions.items():
                if base not in out or bound > out[base]:
                    out[base] = bound
        return out

    def log_value(self, alpha: float, beta: float | None = None) -> float:
        return ledger_to_log_value(self.total, alpha, beta)

    def to_json(self, audit: bool = False) -> dict:
        return {
            "family": self.family,
            "p": self.p,
            "schedule": list(self.schedule),
            "method": self.method,
            "steps": [s.to_json(audit) for s in self.steps],
            "total": self.total.to_json(),
            "closed_form": self.closed_form_name,
            "matches_closed_form": self.total == self.closed_form,
            "validity": {k: _frac_json(v.value) for k, v in self.validity.items()},
            "notes": list(self.notes),
        }

    def to_text(self, audit: bool = False) -> str:
        lines = [f"{self.family}  p={self.p}  schedule={list(self.schedule)}  method={self.method}"]
        for s in self.steps:
            subs = ", ".join(s.substitution_names) or "-"
            lines.append(
                f"  step {s.step_index}: eliminate {s.eliminated} (size {s.current_size} -> "
                f"{s.current_size - s.block_size})  [{subs}]"
            )
            if audit:
                for integral in s.integrals:
                    lines.append(f"      ∫ {integral.variable}: {integral.ledger}")
                for f in s.raw.cancelled():
                    lines.append(f"      cancels {f.label()}")
            lines.append(f"      contributes {s.contribution}")
            if s.residual_exponent_shift != _ZERO:
                lines.append(f"      residual exponent shift +{s.residual_exponent_shift}")
        lines.append(f"  total: {self.total}")
        ok = "=" if self.total == self.closed_form else "≠"
        lines.append(f"  {ok} {self.closed_form_name}")
        conds = ", ".join(f"{_SYMBOL.get(b, b)} > {v}" for b, v in self.validity.items())
        if conds:
            lines.append(f"  valid for {conds}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        return "\n".join(lines)


def _check_p(p):
    if isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise InvalidSchedule(f"p must be a positive integer, got {p!r}")


def _check_schedule(p: int, schedule) -> tuple[int, ...]:
    _check_p(p)
    if schedule is None:
        return (1,) * p
    sched = tuple(schedule)
    if not sched or any(isinstance(q, bool) or not isinstance(q, int) or q < 1 for q in sched):
        raise InvalidSchedule(f"schedule entries must be positive integers, got {list(sched)}")
    if sum(sched) != p:
        raise InvalidSchedule(f"schedule {list(sched)} sums to {sum(sched)}, not p={p}")
    return sched


def compositions(p: int):
    """All ordered block schedules of ``p`` (2^(p-1) of them)."""
    if p == 0:
        yield ()
        return
    for first in range(1, p + 1):
        for rest in compositions(p - first):
            yield (first,) + rest


def _eliminated(r: int, q: int) -> str:
    if q == 1:
        return f"x_{r + 1}{r + 1}" if r + 1 < 10 else f"x_{r + 1},{r + 1}"
    return f"block[{r + 1}:{r + q}]"


def _gamma_step(index, r, q, case, method) -> ReductionStep:
    """Peel a trailing q x q block off an (r+q) x (r+q) gamma-kernel matrix.

    The kernel is ``|X|^(a - h_m) e^{-tr X}`` with ``h_m = (m+1)/2`` (real)
    or ``m`` (complex); after the step the leading r x r block carries the
    same form, so ``alpha`` never changes.
    """
    m = r + q
    real = case == "real"
    # real: offsets in half units, complex: whole units
    unit = 1 if real else 2
    shift = HalfInt(q) if real else HalfInt(2 * q)
    cond = {"alpha": HalfInt((m - 1) * unit)}
    G = "Γ" if real else "Γ̃"
    if r == 0:
        ledger = mvgamma_ledger(q, "alpha", 0, case)
        what = "x_11" if q == 1 else f"X_11 ({q}x{q})"
        return ReductionStep(
            index, _eliminated(0, q), m, q, (),
            (Integral(what, f"direct {G}_{q}(α) integral of the leading block", ledger),),
            _ZERO, cond,
        )
    pi_cross = Fraction(r * q, 2) if real else Fraction(r * q)
    if method == "stiefel":
        if r < q:
            raise InvalidSchedule(
                f"the direction integral needs {G}_{q}({Fraction(r * unit, 2)}) to exist, "
                f"which requires the remaining block ({r}) to be at least the peeled block ({q})"
            )
        subs = (
            ("schur_split", "|X| = |X11| |X22 - X21 X11^-1 X12|"),
            ("y_shift", f"Y = X22^-1/2 X21 X11^-1/2, dX21 = |X22|^{Fraction(r * unit, 2)} "
                        f"|X11|^{Fraction(q * unit, 2)} dY"),
            ("stiefel", "S = Y Y*, integrate out the directions"),
        )
        directions = _pi(pi_cross) / mvgamma_ledger(q, "pure_number", _pure_twice(r, real), case)
        integrals = (
            Integral("X22" if q > 1 else f"x_{m}{m}",
                     f"gamma integral {G}_{q}(α)", mvgamma_ledger(q, "alpha", 0, case)),
            Integral("directions of Y", "Stiefel factor", directions),
            Integral("S" if q > 1 else "u",
                     "beta integral over O < S < I",
                     mvgamma_ledger(q, "pure_number", _pure_twice(r, real), case)
                     * mvgamma_ledger(q, "alpha", -r * unit, case)
                     / mvgamma_ledger(q, "alpha", 0, case)),
        )
    elif method == "gaussian":
        subs = (
            ("schur_split", "|X| = |X11| |X22 - X21 X11^-1 X12|"),
            ("u_shift_block", "U = X22 - X21 X11^-1 X12, dU = dX22"),
            ("gaussian_block", f"Y = X21 X11^-1/2, dX21 = |X11|^{Fraction(q * unit, 2)} dY"),
        )
        integrals = (
            Integral("U", f"gamma integral {G}_{q}(α - {Fraction(r * unit, 2)})",
                     mvgamma_ledger(q, "alpha", -r * unit, case)),
            Integral("Y", "Gaussian integral of e^{-tr YY*}", _pi(pi_cross)),
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    return ReductionStep(index, _eliminated(r, q), m, q, subs, integrals, shift, cond)


def _pure_twice(r: int, real: bool) -> int:
    # argument r/2 (real) or r (complex), in half units
    return r if real else 2 * r


def _reduce_gamma(family, p, schedule, method) -> ReductionTrace:
    case = "complex" if family == "gamma_complex" else "real"
    sched = _check_schedule(p, schedule)
    if method == "auto":
        method = "stiefel" if all(q == 1 for q in sched) else "gaussian"
    if method not in ("stiefel", "gaussian"):
        raise ValueError(f"unknown method {method!r}")
    steps = []
    remaining = list(sched)
    while remaining:
        q = remaining.pop()
        r = sum(remaining)
        steps.append(_gamma_step(len(steps) + 1, r, q, case, method))
    notes = ()
    if method == "stiefel" and any(q > 1 for q in sched):
        notes = ("block directions integrated over the Stiefel manifold (remaining block >= peeled block)",)
    return ReductionTrace(family, p, sched, method, tuple(steps), notes)


def reduce_gamma_real(p: int, schedule: Sequence[int] | None = None,
                      method: str = "auto") -> ReductionTrace:
    """Trace of the real gamma integral ``∫ |X|^(α-(p+1)/2) e^{-tr X} dX``.

    Parameters
    ----------
    p : int
        Matrix order.
    schedule : sequence of int, optional
        Block sizes from the leading block to the trailing one; the trailing
        block is eliminated first.  Defaults to all ones.
    method : {"auto", "stiefel", "gaussian"}
        ``"stiefel"`` integrates the off-diagonal block by polar
        decomposition (direction factor, then a beta integral over
        ``S = YY'``); ``"gaussian"`` integrates the Schur complement first and
        the off-diagonal block as a Gaussian.  ``"auto"`` picks ``"stiefel"``
        for the all-ones schedule and ``"gaussian"`` otherwise.

    Raises
    ------
    InvalidSchedule
        If the schedule does not sum to `p`, or ``"stiefel"`` is asked to
        peel a block larger than what remains.
    """
    return _reduce_gamma("gamma_real", p, schedule, method)


def reduce_gamma_complex(p: int, schedule: Sequence[int] | None = None,
                         method: str = "auto") -> ReductionTrace:
    """Complex (Hermitian) counterpart of :func:`reduce_gamma_real`."""
    return _reduce_gamma("gamma_complex", p, schedule, method)


def _beta1_step(index, m, case) -> ReductionStep:
    real = case == "real"
    unit = 1 if real else 2
    d = (m - 1) * unit  # twice the offset (m-1)/2 real, (m-1) complex
    cond = {"alpha": HalfInt(d), "beta": HalfInt(d)}
    if m == 1:
        ledger = _gamma("alpha", 0) * _gamma("beta", 0) / _gamma("alpha_plus_beta", 0)
        return ReductionStep(
            index, "x_11", 1, 1, (),
            (Integral("x_11", "scalar beta integral over (0, 1)", ledger),),
            _ZERO, cond,
        )
    pi_dir = Fraction(m - 1, 2) if real else Fraction(m - 1)
    # u integral denominator and v integral numerator share Γ(α+β-(m-1)) real,
    # Γ(α+β-2(m-1)) complex
    ab_twice = -2 * (m - 1) if real else -4 * (m - 1)
    h = "(m+1)/2" if real else "m"
    subs = (
        ("schur_split", "|X| and |I - X| split on x_mm"),
        ("y_shift", "y = x_mm - X21 X11^-1 X12, "
                    "X21 X11^-1 X12 < x_mm < 1 - X21 (I - X11)^-1 X12, so 0 < y < b"),
        ("u_ratio", "u = y / b"),
        ("w_whiten", "W = X21 X11^-1/2 (I - X11)^-1/2, b = 1 - W W*"),
        ("stiefel", "v = W W*, integrate out the directions"),
    )
    integrals = (
        Integral("u", f"∫ u^(α-{h}) (1-u)^(β-{h}) du",
                 _gamma("alpha", -d) * _gamma("beta", -d) / _gamma("alpha_plus_beta", ab_twice)),
        Integral("directions of W", "Stiefel factor",
                 _pi(pi_dir) / _gamma("pure_number", d)),
        Integral("v", "∫ v^(k-1) (1-v)^(exponent of b) dv",
                 _gamma("pure_number", d) * _gamma("alpha_plus_beta", ab_twice)
                 / _gamma("alpha_plus_beta", -d)),
    )
    notes = ()
    if real and index == 1:
        notes = ("b exponent α+β-(p+1)+1 recorded in its equal form α+β-p",)
    shift = HalfInt(1) if real else HalfInt(2)
    return ReductionStep(index, _eliminated(m - 1, 1), m, 1, subs, integrals, shift, cond, notes)


def reduce_beta1(p: int, case: str = "real") -> ReductionTrace:
    """One-at-a-time trace of the type-1 beta integral over ``O < X < I``."""
    _check_p(p)
    if case not in ("real", "complex"):
        raise ValueError(f"unknown case {case!r}")
    steps = tuple(_beta1_step(k, p - k + 1, case) for k in range(1, p + 1))
    return ReductionTrace(f"beta1_{case}", p, (1,) * p, "stiefel", steps)


def _beta2_step(index, m, p) -> ReductionStep:
    """Type-2 kernel ``|X|^(α-(m+1)/2) |I+X|^-(α+β_k)`` on an m x m block.

    Each earlier step leaves ``|I + X11|`` with exponent raised by 1/2, so the
    step works with ``β_k = β - (p-m)/2``.
    """
    d = m - 1                # twice (m-1)/2
    s = -(p - m)             # twice the offset of β_k
    cond = {"alpha": HalfInt(d), "beta": HalfInt(p - m)}
    if m == 1:
        ledger = _gamma("alpha", 0) * _gamma("beta", s) / _gamma("alpha_plus_beta", s)
        return ReductionStep(
            index, "x_11", 1, 1, (),
            (Integral("x_11", "scalar type-2 beta integral over (0, ∞)", ledger),),
            _ZERO, cond,
        )
    subs = (
        ("schur_split", "|X| and |I + X| split on x_mm"),
        ("y_shift", "y = x_mm - X21 X11^-1 X12, 0 < y < ∞"),
        ("u_ratio", "u = y / b with b = 1 + W W'"),
        ("w_whiten", "W = X21 X11^-1/2 (I + X11)^-1/2, dX21 = |X11|^1/2 |I + X11|^1/2 dW"),
        ("stiefel", "v = W W', integrate out the directions"),
    )
    integrals = (
        Integral("u", "∫ u^(α-(m+1)/2) (1+u)^-(α+β_k) du",
                 _gamma("alpha", -d) * _gamma("beta", s + d) / _gamma("alpha_plus_beta", s)),
        Integral("directions of W", "Stiefel factor",
                 _pi(Fraction(d, 2)) / _gamma("pure_number", d)),
        Integral("v", "∫ v^((m-1)/2-1) (1+v)^-(β_k+(m-1)/2) dv",
                 _gamma("pure_number", d) * _gamma("beta", s) / _gamma("beta", s + d)),
    )
    notes = ("|I + X11| exponent rises by 1/2, i.e. β_k drops by 1/2 for the next step",)
    return ReductionStep(index, _eliminated(m - 1, 1), m, 1, subs, integrals, HalfInt(1), cond, notes)


def reduce_beta2_real(p: int) -> ReductionTrace:
    """One-at-a-time trace of the real type-2 beta integral over ``X > O``."""
    _check_p(p)
    steps = tuple(_beta2_step(k, p - k + 1, p) for k in range(1, p + 1))
    return ReductionTrace("beta2_real", p, (1,) * p, "stiefel", steps)


def reduce(family: str, p: int, schedule: Sequence[int] | None = None,
           method: str = "auto") -> ReductionTrace:
    """Dispatch on family name; block schedules are only meaningful for gamma."""
    if family == "gamma_real":
        return reduce_gamma_real(p, schedule, method)
    if family == "gamma_complex":
        return reduce_gamma_complex(p, schedule, method)
    sched = _check_schedule(p, schedule)
    if any(q != 1 for q in sched):
        raise InvalidSchedule(f"{family} only supports the one-at-a-time schedule")
    if family == "beta1_real":
        return reduce_beta1(p, "real")
    if family == "beta1_complex":
        return reduce_beta1(p, "complex")
    if family == "beta2_real":
        return reduce_beta2_real(p)
    raise ValueError(f"unknown family {family!r}")
