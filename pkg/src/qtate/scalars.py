"""Truncated Laurent series in t over the rationals.

A :class:`Scalar` is an element of Q((t)) known modulo t**N, where N is the
value's ``precision``.  Values are immutable.  Norms are carried in log scale:
``lognorm(x) = -val(x)``, so ``|t| = e**-1`` and ``|q| = 1`` for any ``q`` with
unit constant term.  The zero element has log-norm :data:`BOTTOM`.
"""
from __future__ import annotations

import os
from fractions import Fraction
from math import gcd
from functools import total_ordering
from typing import Iterable, Mapping, Union

DEFAULT_PRECISION = 16


def default_precision() -> int:
    """Default t-adic precision; ``QTATE_PRECISION`` overrides it."""
    env = os.environ.get("QTATE_PRECISION")
    if env:
        return int(env)
    return DEFAULT_PRECISION


class PrecisionError(ValueError):
    pass


class ZeroDivisorError(ZeroDivisionError):
    pass


@total_ordering
class _Bottom:
    """log|0|: below every rational and absorbing under addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOTTOM"

    def __str__(self):
        return "-inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("qtate.BOTTOM")

    def __lt__(self, other):
        return other is not self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ArithmeticError("BOTTOM - BOTTOM is undefined")
        return self

    def __neg__(self):
        raise ArithmeticError("cannot negate BOTTOM")

    def __reduce__(self):
        return (_Bottom, ())


BOTTOM = _Bottom()

LogNorm = Union[Fraction, _Bottom]


def lognorm_max(values: Iterable[LogNorm]) -> LogNorm:
    best: LogNorm = BOTTOM
    for v in values:
        if best is BOTTOM or (v is not BOTTOM and v > best):
            best = v
    return best


def format_lognorm(v: LogNorm) -> str:
    return "-inf" if v is BOTTOM else str(Fraction(v))


def parse_lognorm(s: str) -> LogNorm:
    return BOTTOM if s == "-inf" else Fraction(s)


Number = Union[int, Fraction]


class Scalar:
    """An element of Q((t)) modulo t**precision."""

    __slots__ = ("_terms", "precision", "_hash", "_int")

    def __init__(self, terms: Mapping[int, Number] | None = None,
                 precision: int | None = None):
        if precision is None:
            precision = default_precision()
        self.precision = int(precision)
        clean = {}
        if terms:
            for e, c in terms.items():
                e = int(e)
                if e < self.precision and c:
                    clean[e] = Fraction(c)
        self._terms = clean
        self._hash = None
        self._int = None

    # construction -------------------------------------------------------
    @classmethod
    def _raw(cls, terms: dict, precision: int) -> "Scalar":
        obj = object.__new__(cls)
        obj._terms = terms
        obj.precision = precision
        obj._hash = None
        obj._int = None
        return obj

    @classmethod
    def const(cls, c: Number, precision: int | None = None) -> "Scalar":
        return cls({0: c}, precision)

    @classmethod
    def t(cls, power: int = 1, precision: int | None = None) -> "Scalar":
        return cls({power: 1}, precision)

    def coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar({0: other}, self.precision)
        raise TypeError(f"cannot coerce {type(other).__name__} to Scalar")

    # inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coeff(self, e: int) -> Fraction:
        return self._terms.get(e, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def val(self):
        """Least exponent with a nonzero coefficient; ``inf`` for zero."""
        if not self._terms:
            return float("inf")
        return min(self._terms)

    def lognorm(self) -> LogNorm:
        if not self._terms:
            return BOTTOM
        return Fraction(-min(self._terms))

    def with_precision(self, precision: int) -> "Scalar":
        return Scalar(self._terms, precision)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        try:
            other = self.coerce(other)
        except TypeError:
            return NotImplemented
        n = min(self.precision, other.precision)
        out = {e: c for e, c in self._terms.items() if e < n}
        for e, c in other._terms.items():
            if e >= n:
                continue
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Scalar._raw(out, n)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw({e: -c for e, c in self._terms.items()}, self.precision)

    def __sub__(self, other):
        try:
            other = self.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Scalar._raw({}, self.precision)
            return Scalar._raw({e: c * other for e, c in self._terms.items()},
                               self.precision)
        if not isinstance(other, Scalar):
            return NotImplemented
        # x + O(t**p) times y + O(t**r) is known modulo t**min(p + val y, r + val x)
        n = min(self.precision + other._low(), other.precision + self._low())
        d1, a = self._integral()
        d2, b = other._integral()
        out: dict = {}
        for e1, c1 in a:
            for e2, c2 in b:
                e = e1 + e2
                if e < n:
                    out[e] = out.get(e, 0) + c1 * c2
        den = d1 * d2
        if den == 1:
            return Scalar._raw({e: Fraction(c) for e, c in out.items() if c}, n)
        return Scalar._raw({e: Fraction(c, den) for e, c in out.items() if c}, n)

    def _low(self) -> int:
        return min(self._terms) if self._terms else self.precision

    def _integral(self):
        """``(d, [(e, n_e)])`` with integer ``n_e`` and coefficients ``n_e / d``."""
        if self._int is None:
            d = 1
            for c in self._terms.values():
                d = d * c.denominator // gcd(d, c.denominator)
            self._int = (d, [(e, c.numerator * (d // c.denominator))
                             for e, c in self._terms.items()])
        return self._int

    __rmul__ = __mul__

    def inv(self) -> "Scalar":
        """Inverse via the geometric series of the unit part.

        With ``v = val(self)`` and precision ``n`` the unit part is known to
        relative precision ``n - v``, so the inverse is known modulo
        ``t**(n - 2v)``.
        """
        if not self._terms:
            raise ZeroDivisorError("scalar is zero modulo t^%d" % self.precision)
        n = self.precision
        v = min(self._terms)
        c0 = self._terms[v]
        # unit u = self / (c0 t^v) = 1 + y, y has positive exponents
        y = {e - v: c / c0 for e, c in self._terms.items() if e != v}
        prec = n - 2 * v
        m = prec + v  # exponents of u^{-1} needed: < prec + v
        inv_u = {0: Fraction(1)}
        # coefficient recursion for 1/(1+y)
        coeffs = [Fraction(0)] * max(m, 1)
        coeffs[0] = Fraction(1)
        ys = sorted(y.items())
        for k in range(1, m):
            s = Fraction(0)
            for e, c in ys:
                if e > k:
                    break
                s += c * coeffs[k - e]
            coeffs[k] = -s
        inv_u = {k: c for k, c in enumerate(coeffs[:m]) if c}
        out = {k - v: c / c0 for k, c in inv_u.items() if k - v < prec}
        return Scalar._raw(out, prec)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        if not isinstance(other, Scalar):
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.coerce(other) * self.inv()

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            return self.inv() ** (-k)
        if k == 0:
            return Scalar._raw({0: Fraction(1)}, self.precision)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.coerce(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        n = min(self.precision, other.precision)
        a = {e: c for e, c in self._terms.items() if e < n}
        b = {e: c for e, c in other._terms.items() if e < n}
        return a == b

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"Scalar({self}, N={self.precision})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items()):
            if e == 0:
                parts.append(str(c))
            else:
                mono = "t" if e == 1 else f"t^{e}"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {"terms": [[e, str(c)] for e, c in sorted(self._terms.items())],
                "precision": self.precision}

    @classmethod
    def from_json(cls, data) -> "Scalar":
        if isinstance(data, (int, str)):
            return cls({0: Fraction(data)})
        return cls({int(e): Fraction(c) for e, c in data["terms"]},
                   data.get("precision"))


def lognorm(x: Scalar) -> LogNorm:
    return x.lognorm()


def one(precision: int | None = None) -> Scalar:
    return Scalar.const(1, precision)


def zero(precision: int | None = None) -> Scalar:
    return Scalar({}, precision)
