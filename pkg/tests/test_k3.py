from fractions import Fraction

import pytest
import sympy

from qtate import k3model
from qtate.k3model import CONVENTION, Convention, chart, embed_j, map_f, project_pi
from qtate.scalars import Scalar
from qtate.spectra import MonomialPoint

Q = Scalar({0: 1, 1: 1})
ONE = Scalar.const(1)
u, v, q = sympy.symbols("u v q")


# -- operator oracle: xi = u * (v -> q v), eta = v, so xi eta = q eta xi --------

def xi(P):
    return sympy.expand(u * P.subs(v, q * v))


def xi_inv(P):
    return sympy.expand((P / u).subs(v, v / q))


def eta(P):
    return sympy.expand(v * P)


def eta_inv(P):
    return sympy.expand(P / v)


def one_plus_eta(P):
    return sympy.expand(P + eta(P))


def seq(*ops):
    """Operator product, rightmost applied first."""
    def run(P):
        for op in reversed(ops):
            P = op(P)
        return P
    return run


CHART_OPERATORS = {
    1: (xi_inv, seq(xi, one_plus_eta), eta_inv),
    2: (seq(one_plus_eta, xi_inv), xi, eta_inv),
    3: (seq(one_plus_eta, eta_inv, xi_inv), seq(xi, eta), eta_inv),
}


@pytest.mark.parametrize("index", [1, 2, 3])
def test_relations_hold_as_operators(index):
    a, b, c = CHART_OPERATORS[index]
    for P in (sympy.Integer(1), u**2 * v**3 + 5 * v / u, v**-2):
        # alpha gamma = q gamma alpha, gamma beta = q beta gamma
        assert sympy.simplify(a(c(P)) - q * c(a(P))) == 0
        assert sympy.simplify(c(b(P)) - q * b(c(P))) == 0
        # beta alpha - q alpha beta = 1 - q
        assert sympy.simplify(b(a(P)) - q * a(b(P)) - (1 - q) * P) == 0
        # alpha beta gamma - gamma = 1
        assert sympy.simplify(a(b(c(P))) - c(P) - P) == 0


def test_convention_selection_is_unique():
    assert k3model.select_conventions(Q) == [CONVENTION]
    assert len(k3model.select_conventions(ONE)) == 8
    assert CONVENTION.describe()["beta_gamma"] == "gamma*beta = q*beta*gamma"


@pytest.mark.parametrize("index", [1, 2, 3])
@pytest.mark.parametrize("qq", [Q, ONE])
def test_chart_residuals_vanish(index, qq):
    pres = k3model.KThreePresentation(qq)
    assert all(r.is_zero() for r in k3model.verify_chart_homomorphism(chart(index, qq), pres))


def test_wrong_convention_leaves_residuals():
    cv = Convention(True, True, True)
    pres = k3model.KThreePresentation(Q, cv)
    res = k3model.verify_chart_homomorphism(chart(1, Q, cv), pres)
    assert any(not r.is_zero() for r in res)


def test_specialization():
    pres = k3model.KThreePresentation(Q).specialize()
    assert pres.q == 1
    # at q = 1 the third relation is plain commutativity
    r3 = pres.relations()[2]
    assert set(r3.terms) == {(2, 1), (1, 2)}


# -- tropical compatibility ------------------------------------------------

def test_map_f_examples():
    assert map_f((-1, 2), chart(1, Q)) == (1, 1, -2)
    assert map_f(MonomialPoint((0, 0)), chart(1, Q)) == (0, 0, 0)
    assert map_f((2, -1), chart(2, Q)) == (0, 2, 1)


def test_outside_region():
    with pytest.raises(k3model.OutsideRegion):
        map_f((5, 0), chart(1, Q))
    with pytest.raises(k3model.OutsideRegion):
        k3model.chart_projection(chart(3, Q), -1, 1)


def test_embedding_roundtrip():
    for x in range(-4, 5):
        for y in range(-4, 5):
            p = (Fraction(x, 2), Fraction(y, 3))
            assert project_pi(embed_j(*p)) == p
    with pytest.raises(k3model.NotInImage):
        project_pi((1, 5, 0))


@pytest.mark.parametrize("index,minimum", [(1, 200), (2, 100), (3, 100)])
def test_compatibility_sweeps(index, minimum):
    ch = chart(index, Q)
    rep = k3model.compatibility_sweep(ch, k3model.grid(ch, 20))
    assert rep.ok and rep.points >= minimum
    if index == 1:
        assert rep.branches["j_left"] and rep.branches["j_right"]
    if index == 2:
        assert rep.branches["pi2_shifted"] and rep.branches["pi2_plain"]


def test_regions():
    U = k3model.regions()
    assert U["U1"].contains(-1, 0) and not U["U1"].contains(1, 0)
    assert U["U1"].contains(0, 0, closed=True) and not U["U1"].contains(0, 0)
    both = U["U1"] & U["U3"]
    assert both.contains(Fraction(1, 4), 1) and not both.contains(1, 1)


# -- gluing ------------------------------------------------------------------

@pytest.mark.parametrize("overlap", ["12", "13"])
def test_gluing(overlap):
    rep = k3model.glue_automorphism_check(overlap, Q)
    assert rep.ok
    assert rep.sampled_points >= 10 and rep.certified_points == rep.sampled_points


def test_gluing_shapes():
    phi = k3model.gluing_automorphism("13", ONE)
    # xi -> xi (1 + 1/eta), eta -> eta
    assert set(phi.images[0].terms) == {(1, 0), (1, -1)}
    assert set(phi.images[1].terms) == {(0, 1)}
    with pytest.raises(ValueError):
        k3model.gluing_automorphism("23", Q)


def test_identification_roundtrip():
    assert k3model.identification_roundtrip(Q)
    assert k3model.identification_roundtrip(ONE)
