"""Points of the Berkovich spectrum of quantum polydiscs and tori.

Three kinds of seminorm are implemented, all valued in log scale:

* :class:`MonomialPoint` -- ``nu_x(f) = max lognorm(a_lam) + lam . x``;
* :class:`ShiftedPolydiscPoint` -- expand each ordered monomial in the shifted
  variables ``t_i = T_i - a_i`` and take the weighted max of the new
  coefficients (requires ``lognorm(a_i) <= rho_i`` and ``|1 - q| < 1``);
* :class:`ShiftedTorusPoint` -- same, with negative powers expanded through
  ``(t + a)**-1 = t**-1 * sum (-a/t)**m`` truncated at a tail order and
  returned with a certified bound on everything discarded.

Shifted evaluation works in the ordered-monomial basis
(``TwistForm.ordered``), where ``T**lam = T_1**l_1 ... T_d**l_d`` and the
scalars ``a_i`` are central, so each slot expands by the binomial theorem on
its own.  Inputs in another basis are rebased first.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Sequence

from .qalg import TORUS, TwistForm, TwistedElement, gauss_norm, rebase
from .scalars import BOTTOM, LogNorm, Scalar, format_lognorm, lognorm_max


class InvalidPoint(ValueError):
    pass


class CertificationError(ArithmeticError):
    """Tail order too small to pin down the torus seminorm."""


def _fracs(xs) -> tuple:
    return tuple(Fraction(x) for x in xs)


def generalized_binomial(n: int, k: int) -> int:
    """``n choose k`` for any integer ``n`` and ``k >= 0``."""
    if n >= 0:
        return comb(n, k)
    return (-1) ** k * comb(k - n - 1, k)


@dataclass(frozen=True)
class MonomialPoint:
    x: tuple

    def __init__(self, x: Sequence):
        object.__setattr__(self, "x", _fracs(x))

    @property
    def dim(self):
        return len(self.x)

    def to_json(self):
        return {"kind": "monomial", "x": [str(v) for v in self.x]}


@dataclass(frozen=True)
class ShiftedPolydiscPoint:
    a: tuple
    rho: tuple
    radius: tuple | None = None

    def __init__(self, a: Sequence[Scalar], rho: Sequence, radius: Sequence | None = None):
        a = tuple(a)
        rho = _fracs(rho)
        if len(a) != len(rho):
            raise InvalidPoint("a and rho differ in length")
        for ai, ri in zip(a, rho):
            if ai.lognorm() is not BOTTOM and ai.lognorm() > ri:
                raise InvalidPoint(f"|a| = {ai.lognorm()} exceeds rho = {ri}")
        if radius is not None:
            radius = _fracs(radius)
            if len(radius) != len(rho) or any(ri >= Ri for ri, Ri in zip(rho, radius)):
                raise InvalidPoint("need rho < r componentwise")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "radius", radius)

    @property
    def dim(self):
        return len(self.rho)

    def to_json(self):
        return {"kind": "shifted_polydisc", "a": [x.to_json() for x in self.a],
                "rho": [str(v) for v in self.rho],
                "radius": None if self.radius is None else [str(v) for v in self.radius]}


@dataclass(frozen=True)
class ShiftedTorusPoint:
    a: tuple
    rho: tuple
    tail_order: int = 8

    def __init__(self, a: Sequence[Scalar], rho: Sequence, tail_order: int = 8):
        a = tuple(a)
        rho = _fracs(rho)
        if len(a) != len(rho):
            raise InvalidPoint("a and rho differ in length")
        if tail_order < 1:
            raise InvalidPoint("tail order must be >= 1")
        if self._delta(a, rho) <= 0:
            raise InvalidPoint("torus points need lognorm(a_i) < rho_i strictly")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "tail_order", int(tail_order))

    @staticmethod
    def _delta(a, rho):
        gaps = [ri - ai.lognorm() for ai, ri in zip(a, rho) if ai.lognorm() is not BOTTOM]
        return min(gaps) if gaps else Fraction(10**9)

    @property
    def delta(self) -> Fraction:
        """Guaranteed per-step decay of the geometric tail."""
        return self._delta(self.a, self.rho)

    @property
    def dim(self):
        return len(self.rho)

    def to_json(self):
        return {"kind": "shifted_torus", "a": [x.to_json() for x in self.a],
                "rho": [str(v) for v in self.rho], "tail_order": self.tail_order}


SpectrumPoint = MonomialPoint | ShiftedPolydiscPoint | ShiftedTorusPoint


def point_from_json(data) -> SpectrumPoint:
    kind = data["kind"]
    if kind == "monomial":
        return MonomialPoint(data["x"])
    a = [Scalar.from_json(x) for x in data["a"]]
    if kind == "shifted_polydisc":
        return ShiftedPolydiscPoint(a, data["rho"], data.get("radius"))
    if kind == "shifted_torus":
        return ShiftedTorusPoint(a, data["rho"], data.get("tail_order", 8))
    raise ValueError(f"unknown point kind {kind!r}")


# ----------------------------------------------------------------------
# evaluation


def monomial_eval(f: TwistedElement, x: Sequence) -> LogNorm:
    return gauss_norm(f, x)


def _to_ordered(f: TwistedElement) -> TwistedElement:
    target = TwistForm.ordered(f.twist.commutation())
    return f if f.twist == target else rebase(f, target)


def _check_q(f: TwistedElement):
    if (f.q - 1).lognorm() is not BOTTOM and (f.q - 1).lognorm() >= 0:
        raise InvalidPoint("shifted points need |1 - q| < 1")


def shifted_coefficients(f: TwistedElement, a: Sequence[Scalar],
                         tail_order: int | None = None) -> dict:
    """Coefficients of ``f`` on ordered monomials ``t**n`` with ``t_i = T_i - a_i``.

    Nonnegative slots expand by the binomial theorem exactly.  A negative slot
    ``(t + a)**l`` becomes ``sum_m binom(l, m) a**m t**(l - m)``, cut at
    ``m <= tail_order``.
    """
    f = _to_ordered(f)
    d = f.dim
    slot_cache: dict = {}

    def slot(i, l):
        key = (i, l)
        if key not in slot_cache:
            if l >= 0:
                ms = range(l + 1)
            else:
                if tail_order is None:
                    raise ValueError("negative exponents need a tail order")
                ms = range(tail_order + 1)
            ai = a[i]
            slot_cache[key] = [(l - m, ai ** m * generalized_binomial(l, m))
                               for m in ms]
        return slot_cache[key]

    out: dict = {}
    for lam, c in f.terms.items():
        partial = [((), c)]
        for i in range(d):
            nxt = []
            for n, coef in partial:
                for e, b in slot(i, lam[i]):
                    if b:
                        nxt.append((n + (e,), coef * b))
            partial = nxt
        for n, coef in partial:
            out[n] = out[n] + coef if n in out else coef
    return {n: c for n, c in out.items() if c}


def shifted_eval_polydisc(f: TwistedElement, p: ShiftedPolydiscPoint) -> LogNorm:
    if f.dim != p.dim:
        raise ValueError("dimension mismatch")
    if any(l < 0 for lam in f.terms for l in lam):
        raise ValueError("polydisc evaluation needs nonnegative exponents")
    _check_q(f)
    coeffs = shifted_coefficients(f, p.a)
    return lognorm_max(c.lognorm() + sum(n_i * r for n_i, r in zip(n, p.rho))
                       for n, c in coeffs.items())


@dataclass(frozen=True)
class TorusValue:
    """Seminorm value with a bound on the discarded tail.

    ``tail_bound`` dominates the weighted log-norm of every dropped term, so
    the value is certified exact when it exceeds the bound.
    """
    value: LogNorm
    tail_bound: LogNorm
    certified: bool

    def to_json(self):
        return {"lognorm": format_lognorm(self.value),
                "tail_bound": format_lognorm(self.tail_bound),
                "certified": self.certified}


def shifted_eval_torus(f: TwistedElement, p: ShiftedTorusPoint,
                       strict: bool = True) -> TorusValue:
    if f.dim != p.dim:
        raise ValueError("dimension mismatch")
    _check_q(f)
    rho = p.rho
    M = p.tail_order
    coeffs = shifted_coefficients(f, p.a, M)
    value = lognorm_max(c.lognorm() + sum(n_i * r for n_i, r in zip(n, rho))
                        for n, c in coeffs.items())
    # every dropped term of T**lam has weight <= |c_lam| rho**lam - (M+1) delta
    has_tail = [lam for lam in f.terms if any(l < 0 for l in lam)]
    if has_tail:
        top = lognorm_max(f.terms[lam].lognorm() + sum(l * r for l, r in zip(lam, rho))
                          for lam in has_tail)
        tail = top - (M + 1) * p.delta
    else:
        tail = BOTTOM
    certified = tail is BOTTOM or (value is not BOTTOM and value > tail)
    if strict and not certified:
        raise CertificationError(
            f"tail order {M} cannot certify: value {format_lognorm(value)}, "
            f"tail bound {format_lognorm(tail)}")
    return TorusValue(value, tail, certified)


def evaluate(p: SpectrumPoint, f: TwistedElement) -> LogNorm:
    """Seminorm value of ``f`` at ``p`` (torus values must be certified)."""
    if isinstance(p, MonomialPoint):
        return monomial_eval(f, p.x)
    if isinstance(p, ShiftedPolydiscPoint):
        return shifted_eval_polydisc(f, p)
    if isinstance(p, ShiftedTorusPoint):
        return shifted_eval_torus(f, p).value
    raise TypeError(type(p).__name__)


# ----------------------------------------------------------------------
# membership checks


@dataclass
class MultiplicativityReport:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {"checked": self.checked, "ok": self.ok,
                "failures": [{"index": i, "lhs": format_lognorm(l),
                              "rhs": format_lognorm(r)} for i, l, r in self.failures]}


def check_point_multiplicative(p: SpectrumPoint,
                               pairs: Iterable[tuple]) -> MultiplicativityReport:
    """``nu(fg) == nu(f) + nu(g)`` on each pair; torus values must certify."""
    report = MultiplicativityReport()
    for i, (f, g) in enumerate(pairs):
        report.checked += 1
        try:
            lhs = evaluate(p, f * g)
            rhs = evaluate(p, f) + evaluate(p, g)
        except CertificationError:
            report.failures.append((i, BOTTOM, BOTTOM))
            continue
        if lhs != rhs:
            report.failures.append((i, lhs, rhs))
    return report


@dataclass
class SeminormReport:
    """Finite-sample evidence only: a pass never proves membership in P(A)."""
    unit_ok: bool
    submultiplicative_failures: list
    bound_log_c: LogNorm
    bounded_ok: bool

    @property
    def ok(self):
        return self.unit_ok and not self.submultiplicative_failures and self.bounded_ok

    def to_json(self):
        return {"ok": self.ok, "unit_ok": self.unit_ok,
                "submultiplicative_failures": self.submultiplicative_failures,
                "log_c": format_lognorm(self.bound_log_c),
                "bounded_ok": self.bounded_ok}


def check_submultiplicative_bounded(seminorm: Callable, samples: Sequence,
                                    ambient: Callable, unit,
                                    log_c: Fraction | None = Fraction(0)) -> SeminormReport:
    """Test ``|ab| <= |a||b|``, ``|1| = 1`` and ``|a| <= C |a|_A`` on samples.

    The smallest ``log C`` consistent with the samples is reported; the bound
    passes when it does not exceed ``log_c`` (``None`` accepts any finite C).
    """
    unit_ok = seminorm(unit) == 0
    fails = []
    for i, a in enumerate(samples):
        for j, b in enumerate(samples):
            lhs = seminorm(a * b)
            rhs = seminorm(a) + seminorm(b)
            if lhs is not BOTTOM and (rhs is BOTTOM or lhs > rhs):
                fails.append((i, j))
    worst: LogNorm = BOTTOM
    for a in samples:
        v, w = seminorm(a), ambient(a)
        if v is BOTTOM:
            continue
        if w is BOTTOM:
            worst = Fraction(10**9)
            break
        gap = v - w
        worst = gap if worst is BOTTOM or gap > worst else worst
    bounded = log_c is None or worst is BOTTOM or worst <= log_c
    return SeminormReport(unit_ok, fails, worst, bounded)


# ----------------------------------------------------------------------
# skeleton


def skeleton_embed(x: Sequence) -> MonomialPoint:
    return MonomialPoint(x)


def skeleton_retract(p: SpectrumPoint) -> tuple:
    """``(log|T_1|_p, ..., log|T_d|_p)``."""
    d = p.dim
    tw = TwistForm.zero(d)
    prec = max([x.precision for x in getattr(p, "a", ())], default=None)
    q = Scalar.const(1, prec)
    out = []
    for i in range(d):
        e = tuple(1 if j == i else 0 for j in range(d))
        out.append(evaluate(p, TwistedElement.monomial(tw, q, e, domain=TORUS)))
    return tuple(out)
