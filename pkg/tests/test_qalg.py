import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qtate import samples
from qtate.qalg import (POLYDISC, TORUS, FreeElement, TwistForm, TwistMismatch,
                        TwistedElement, gauss_norm, monomial_inverse, ordered_coefficient,
                        rebase, substitute)
from qtate.scalars import BOTTOM, Scalar

Q = Scalar({0: 1, 1: 1})
U, V = sympy.symbols("u v")


def _operator_image(f: TwistedElement, s: int, poly):
    """Apply ``f`` to ``poly`` with ``T0 = u * (v -> q**s v)`` and ``T1 = v``."""
    q = sympy.Integer(2)
    out = 0
    for (a, b), c in f.items():
        c0 = sympy.Rational(c.coeff(0).numerator, c.coeff(0).denominator)
        out += c0 * U**a * q**(s * a * b) * V**b * poly.subs(V, q**(s * a) * V)
    return sympy.expand(out)


@given(st.integers(-2, 2), st.integers(0, 2**31))
@settings(max_examples=40, deadline=None)
def test_product_matches_operator_representation(s, seed):
    rng = random.Random(seed)
    B = TwistForm.ordered([[0, s], [-s, 0]])
    q = Scalar.const(2)
    f = TwistedElement(B, q, {(rng.randint(-2, 2), rng.randint(-2, 2)): rng.randint(-3, 3)
                              for _ in range(3)})
    g = TwistedElement(B, q, {(rng.randint(-2, 2), rng.randint(-2, 2)): rng.randint(-3, 3)
                              for _ in range(3)})
    lhs = _operator_image(f * g, s, sympy.Integer(1))
    rhs = _operator_image(f, s, _operator_image(g, s, sympy.Integer(1)))
    assert sympy.expand(lhs - rhs) == 0


def test_q_commutation_of_generators():
    B = TwistForm.q_commuting(3)
    one = TwistedElement.constant(B, Q)
    x = [one.mono(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    for i in range(3):
        for j in range(i + 1, 3):
            assert x[i] * x[j] == (x[j] * x[i]).scale(Q)


def test_skew_generators_commute_up_to_q_power():
    B = TwistForm.skew([[0, 2], [-2, 0]])
    one = TwistedElement.constant(B, Q)
    a, b = one.mono((1, 0)), one.mono((0, 1))
    assert a * b == (b * a).scale(Q ** 4)


@st.composite
def triples(draw):
    rng = random.Random(draw(st.integers(0, 2**31)))
    d = draw(st.integers(1, 3))
    B = samples.skew_twist(rng, d) if draw(st.booleans()) else TwistForm.q_commuting(d)
    return tuple(samples.element(rng, B, Q, degree=3, terms=3, lo=0) for _ in range(3))


@given(triples())
@settings(max_examples=40, deadline=None)
def test_associative_and_distributive(fgh):
    f, g, h = fgh
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


@given(triples(), st.lists(st.fractions(-3, 3, max_denominator=4), min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_gauss_norm_multiplicative(fgh, rho):
    f, g, _ = fgh
    r = rho[:f.dim]
    assert gauss_norm(f * g, r) == gauss_norm(f, r) + gauss_norm(g, r)


def test_gauss_norm_example():
    B = TwistForm.q_commuting(2)
    f = TwistedElement(B, Q, {(1, 0): 1, (0, 1): Scalar.t(), (2, 1): Scalar({0: 3, 1: -1})})
    assert gauss_norm(f, (0, 0)) == 0
    assert gauss_norm(f, (Fraction(1, 2), 2)) == 3
    assert gauss_norm(f.like({}), (0, 0)) is BOTTOM


def test_commutative_when_q_is_one():
    rng = random.Random(7)
    B = TwistForm.q_commuting(2)
    one = Scalar.const(1)
    f, g = samples.element(rng, B, one), samples.element(rng, B, one)
    assert f * g == g * f


def test_rebase_is_an_algebra_isomorphism():
    rng = random.Random(11)
    skew = TwistForm.skew([[0, 1], [-1, 0]])
    ordered = TwistForm.ordered([[0, 2], [-2, 0]])
    assert skew.commutation() == ordered.commutation()
    for _ in range(20):
        f, g = samples.element(rng, skew, Q, 3, lo=0), samples.element(rng, skew, Q, 3, lo=0)
        assert rebase(f * g, ordered) == rebase(f, ordered) * rebase(g, ordered)
        assert rebase(rebase(f, ordered), skew) == f


def test_rebase_rejects_different_commutation():
    f = TwistedElement.constant(TwistForm.q_commuting(2), Q)
    with pytest.raises(TwistMismatch):
        rebase(f, TwistForm.skew([[0, 2], [-2, 0]]))


def test_ordered_coefficient_matches_products():
    B = TwistForm.skew([[0, 1, -1], [-1, 0, 2], [1, -2, 0]])
    one = TwistedElement.constant(B, Q)
    gens = [one.mono(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    inv = [monomial_inverse(x) for x in gens]
    for lam in ((2, -1, 3), (-2, 1, 0), (0, -3, -1)):
        prod = one
        for i, k in enumerate(lam):
            for _ in range(abs(k)):
                prod = prod * (gens[i] if k > 0 else inv[i])
        assert prod == one.mono(lam, ordered_coefficient(B, Q, lam))


def test_substitute_identity_and_swap():
    rng = random.Random(3)
    B = TwistForm.q_commuting(2)
    one = TwistedElement.constant(B, Q)
    gens = [one.mono((1, 0)), one.mono((0, 1))]
    inv = [monomial_inverse(x) for x in gens]
    f = samples.element(rng, B, Q, degree=3)
    assert substitute(f, gens, inv) == f
    # x -> x y is an automorphism of the q-commuting torus
    images = [gens[0] * gens[1], gens[1]]
    image_inv = [monomial_inverse(images[0]), inv[1]]
    g = samples.element(rng, B, Q, degree=3)
    assert substitute(f * g, images, image_inv) == \
        substitute(f, images, image_inv) * substitute(g, images, image_inv)


def test_monomial_inverse():
    B = TwistForm.q_commuting(2)
    m = TwistedElement.monomial(B, Q, (2, -3), Scalar({1: 2}))
    one = TwistedElement.constant(B, Q)
    assert m * monomial_inverse(m) == one
    assert monomial_inverse(m) * m == one
    with pytest.raises(ValueError):
        monomial_inverse(m + one)


def test_domains():
    B = TwistForm.q_commuting(2)
    with pytest.raises(ValueError):
        TwistedElement(B, Q, {(-1, 0): 1}, domain=POLYDISC)
    with pytest.raises(ValueError):
        TwistedElement(B, Q * Scalar.t(), {(1, 0): 1})
    f = TwistedElement(B, Q, {(1, 0): 1}, domain=POLYDISC)
    assert (f * f).domain == POLYDISC
    assert (f * TwistedElement(B, Q, {(-1, 0): 1})).domain == TORUS


def test_twisted_json_roundtrip():
    rng = random.Random(5)
    B = samples.skew_twist(rng, 3)
    f = samples.element(rng, B, Q)
    assert TwistedElement.from_json(f.to_json()) == f


def test_free_algebra():
    x, y = FreeElement.word(2, 1), FreeElement.word(2, 2)
    assert x * y != y * x
    assert (x * y - y * x).terms == {(1, 2): Scalar.const(1), (2, 1): Scalar.const(-1)}
    rng = random.Random(9)
    for _ in range(20):
        f, g, h = (samples.free_element(rng, 3) for _ in range(3))
        assert (f * g) * h == f * (g * h)
        assert FreeElement.from_json(f.to_json()) == f
