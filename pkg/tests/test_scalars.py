from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qtate.scalars import (BOTTOM, Scalar, ZeroDivisorError, default_precision,
                           format_lognorm, lognorm_max, parse_lognorm)

T = sympy.Symbol("t")

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def scalars(draw, lo=-3, hi=10, nonzero=False):
    terms = draw(st.dictionaries(st.integers(lo, hi), coeffs, max_size=4))
    s = Scalar(terms)
    if nonzero and not s:
        s = Scalar({draw(st.integers(lo, hi)): 1})
    return s


def to_sympy(x: Scalar):
    return sum(sympy.Rational(c.numerator, c.denominator) * T**e for e, c in x.items())


def from_sympy(expr, precision):
    # shift by t**40 so sympy sees a polynomial
    poly = sympy.Poly(sympy.expand(expr * T**40), T)
    return Scalar({e - 40: Fraction(int(c.p), int(c.q)) for (e,), c in poly.terms()}, precision)


@given(scalars(), scalars())
def test_product_matches_polynomial_oracle(a, b):
    prod = a * b
    expected = from_sympy(to_sympy(a) * to_sympy(b), prod.precision)
    assert prod == expected


@given(scalars(), scalars(), scalars())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0


@given(scalars(nonzero=True))
def test_inverse(a):
    inv = a.inv()
    assert a * inv == 1
    assert inv.precision == a.precision - 2 * a.val()


def test_inverse_precision_is_honest():
    x = Scalar({-2: 1, 0: 3, 5: 1})
    assert x * x.inv() == 1
    # relative precision 18 survives inversion
    assert (x * x.inv()).precision == 18
    # t + t^2 known mod t^4 has inverse known mod t^2
    y = Scalar({1: 1, 2: 1}, precision=4)
    assert y.inv().precision == 2
    assert y.inv() == Scalar({-1: 1, 0: -1, 1: 1})


def test_geometric_series():
    inv = (1 - Scalar.t()).inv()
    assert inv == Scalar({k: 1 for k in range(default_precision())})


def test_small_examples():
    assert Scalar({0: 1, 1: 1}, 5) * Scalar({0: 1, 1: -1}, 5) == Scalar({0: 1, 2: -1}, 5)
    assert (Scalar.t() * Scalar.t(2)).val() == 3
    assert (Scalar({0: 1, 1: 1}) - 1).val() == 1
    assert Scalar({0: 1, 1: 1}, 5).inv() == Scalar({0: 1, 1: -1, 2: 1, 3: -1, 4: 1}, 5)
    assert Scalar.t().inv() == Scalar.t(-1)
    assert Scalar({0: 2, 1: 1}, 3).inv() == Scalar({0: Fraction(1, 2), 1: Fraction(-1, 4),
                                                   2: Fraction(1, 8)}, 3)
    assert Scalar({0: 3, 1: 5}).lognorm() == 0
    assert Scalar({}).val() == float("inf")


@given(scalars(nonzero=True), scalars(nonzero=True))
@settings(max_examples=1000)
def test_valuation_additive(a, b):
    assert (a * b).val() == a.val() + b.val()


@given(scalars(), scalars())
def test_lognorm_multiplicative_and_ultrametric(a, b):
    assert (a * b).lognorm() == a.lognorm() + b.lognorm() or (a * b).is_zero()
    s = (a + b).lognorm()
    assert s is BOTTOM or s <= lognorm_max([a.lognorm(), b.lognorm()])
    if a.lognorm() != b.lognorm():
        assert s == lognorm_max([a.lognorm(), b.lognorm()])


def test_lognorm_values():
    assert Scalar.t(3).lognorm() == -3
    assert Scalar({-2: 5, 1: 1}).lognorm() == 2
    assert Scalar({}).lognorm() is BOTTOM
    assert BOTTOM + 7 is BOTTOM
    assert BOTTOM < Fraction(-10**6)


def test_lognorm_text_roundtrip():
    for v in (Fraction(3, 2), Fraction(-4), BOTTOM):
        assert parse_lognorm(format_lognorm(v)) == v
    assert format_lognorm(BOTTOM) == "-inf"


def test_precision_propagation():
    a = Scalar({0: 1, 5: 1}, precision=4)
    b = Scalar({0: 1}, precision=10)
    assert (a + b).precision == 4
    assert (a * b).precision == 4
    assert a.coeff(5) == 0
    # a + O(t^4) times t^3 + O(t^10) is known modulo t^7
    assert (a * Scalar.t(3, precision=10)).precision == 7
    assert (a * Scalar.t(-2, precision=10)).precision == 2


def test_precision_from_environment(monkeypatch):
    monkeypatch.setenv("QTATE_PRECISION", "7")
    assert Scalar.const(1).precision == 7


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisorError):
        Scalar({}).inv()
    with pytest.raises(ZeroDivisionError):
        Scalar.const(1) / Scalar({})


@given(scalars(nonzero=True), st.integers(-3, 3))
@settings(max_examples=50)
def test_powers(a, k):
    if a.val() != 0 and abs(k) > 1:
        return
    p = a ** k
    expected = Scalar.const(1, a.precision)
    for _ in range(abs(k)):
        expected = expected * (a if k > 0 else a.inv())
    assert p == expected


@given(scalars())
def test_json_roundtrip(a):
    b = Scalar.from_json(a.to_json())
    assert b == a and b.precision == a.precision
