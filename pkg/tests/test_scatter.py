import math
from fractions import Fraction

import pytest
import sympy

from qtate import scatter
from qtate.qalg import TwistForm
from qtate.scalars import Scalar
from qtate.scatter import (Grading, Line, RayFunction, ScatteringDiagram, compose, factorize,
                           invert, product, scatter_chart, transport, wall_aut)

B = TwistForm.ordered([[0, 1], [-1, 0]])
ONE = Scalar.const(1)
Q = Scalar({0: 1, 1: 1})
XI, ETA = sympy.symbols("xi eta")


def walls(q, order=6):
    return wall_aut((1, 0), {1: 1}, B, q, order=order), wall_aut((0, 1), {1: 1}, B, q, order=order)


# -- exact birational oracle at q = 1 ----------------------------------------

def ray_map(e0, coeffs, sign=1):
    """``m(mu) -> m(mu) f(z)**(sign det(e0, mu))`` as rational functions."""
    z = XI ** e0[0] * ETA ** e0[1]
    f = 1 + sum(c * z ** j for j, c in coeffs.items())
    k1 = sign * scatter.det2(e0, (1, 0))
    k2 = sign * scatter.det2(e0, (0, 1))
    return (XI * f ** k1, ETA * f ** k2)


def sym_compose(phi, psi):
    return tuple(sympy.cancel(e.subs({XI: psi[0], ETA: psi[1]}, simultaneous=True)) for e in phi)


def test_pentagon_is_exact_as_birational_maps():
    g0 = ray_map((-1, 0), {1: 1})
    ginf = ray_map((0, -1), {1: 1})
    F = factorize(*walls(ONE), order=6)
    factors = [ray_map(F.factors[lam].e0,
                       {j: Fraction(c.coeff(0)) for j, c in F.factors[lam].coeffs},
                       F.factors[lam].sign)
               for lam in F.slopes()]
    lhs = sym_compose(ginf, g0)
    rhs = factors[0]
    for f in factors[1:]:
        rhs = sym_compose(rhs, f)
    assert all(sympy.cancel(a - b) == 0 for a, b in zip(lhs, rhs))


def test_wall_images_match_definition():
    g0, ginf = walls(ONE, order=4)
    series = {0: 1, -1: -1, -2: 1, -3: -1, -4: 1}
    eta_image = g0.images[1]
    assert {lam[0]: c.coeff(0) for lam, c in eta_image.terms.items()} == series
    assert {lam for lam in ginf.images[0].terms} == {(1, 0), (1, -1)}


# -- group structure -----------------------------------------------------------

@pytest.mark.parametrize("q", [ONE, Q])
def test_inverse_and_associativity(q):
    g0, ginf = walls(q)
    mid = wall_aut((1, 1), {1: 1, 2: Fraction(1, 2)}, B, q, order=6)
    ident = scatter.WallAutomorphism.identity(B, q, order=6)
    for g in (g0, ginf, mid):
        assert compose(g, invert(g)).is_identity()
        assert compose(invert(g), g).is_identity()
        assert invert(invert(g)) == g
        assert compose(g, ident) == g
    assert compose(compose(g0, mid), ginf) == compose(g0, compose(mid, ginf))


@pytest.mark.parametrize("q", [ONE, Q])
def test_walls_preserve_commutation(q):
    for alpha in ((1, 0), (0, 1), (1, 1), (2, 1), (1, 3)):
        g = wall_aut(alpha, {1: 1, 2: 3}, B, q, order=5)
        assert g.commutation_defect().is_zero()
    # covectors outside the graded cone carry no wall
    with pytest.raises(scatter.NotExpressible):
        wall_aut((-1, 3), {1: 1}, B, q, order=5)


def test_product_of_one_is_itself_and_empty_product_fails():
    g0, _ = walls(Q)
    assert product([g0]) == g0
    with pytest.raises(ValueError):
        product([])


# -- factorization -------------------------------------------------------------

@pytest.mark.parametrize("q", [ONE, Q])
def test_pentagon_factorization(q):
    g0, ginf = walls(q)
    F = factorize(g0, ginf, order=6)
    assert F.slopes() == [0, 1, math.inf]
    assert F.residual().is_identity()
    assert F.product() == compose(ginf, g0)
    for lam in F.slopes():
        assert F.grading.slope(F.factors[lam].e0) == lam


def test_quantum_middle_factor():
    """The slope-1 wall at q = 1 + t is ``1 + q**-1 z``; its t -> 0 limit is ``1 + z``."""
    F = factorize(*walls(Q), order=6)
    mid = F.factors[1].as_dict()
    assert set(mid) == {1}
    assert mid[1] == Q.inv()
    assert mid[1].coeff(0) == 1


def test_refinement_keeps_low_order_factors():
    low = factorize(*walls(Q, 4), order=4)
    high = factorize(*walls(Q, 8), order=8)
    assert low.slopes() == high.slopes()
    g = Grading.standard()
    for lam in low.slopes():
        ray = high.factors[lam]
        kept = {j: c for j, c in ray.as_dict().items() if j * g.order(ray.e0) <= 4}
        assert kept == low.factors[lam].as_dict()


def test_scattering_with_multiplicity_has_many_slopes():
    g0 = wall_aut((1, 0), {1: 2, 2: 1}, B, ONE, order=6)
    ginf = wall_aut((0, 1), {1: 2, 2: 1}, B, ONE, order=6)
    F = factorize(g0, ginf)
    assert len(F.slopes()) > 3
    assert F.residual().is_identity()


def test_factorize_rejects_misplaced_walls():
    g0, ginf = walls(ONE)
    with pytest.raises(scatter.NotExpressible):
        factorize(ginf, g0)


def test_commuting_walls_factor_trivially():
    g0 = wall_aut((1, 0), {1: 1}, B, ONE, order=6)
    ident = scatter.WallAutomorphism.identity(B, ONE, order=6)
    F = factorize(g0, ident)
    assert F.slopes() == [0]


# -- transport and angle regions ---------------------------------------------

def test_transport():
    g0, ginf = walls(Q)
    C = Scalar.t()
    twice = transport(transport(ginf, C), C)
    assert twice == transport(ginf, C * C)
    assert transport(compose(ginf, g0), C) == compose(transport(ginf, C), transport(g0, C))
    assert transport(ginf, C).commutation_defect().is_zero()
    with pytest.raises(ValueError):
        transport(ginf, Q)


def test_angle_region_bound():
    region = scatter.AngleRegion((0, 0), (1, 0), (0, 1))
    g0, ginf = walls(Q)
    assert region.bound_holds(g0) and region.bound_holds(ginf)
    shifted = scatter.AngleRegion((-1, -1), (1, 0), (0, 1))
    assert not shifted.bound_holds(ginf)
    assert shifted.bound_holds(transport(ginf, Scalar.t()))
    with pytest.raises(ValueError):
        scatter.AngleRegion((0, 0), (0, 1), (1, 0))


def test_grading():
    g = Grading((1, 0), (0, 1))
    assert g.coords((-2, -3)) == (2, 3)
    assert g.order((-2, -3)) == 5
    assert g.slope((-2, -3)) == Fraction(3, 2)
    assert g.slope((0, -1)) == math.inf
    assert scatter.parse_slope(scatter.format_slope(math.inf)) == math.inf
    assert scatter.primitive((4, -6)) == (2, -3)


def test_aut_json_roundtrip():
    g0, _ = walls(Q)
    back = scatter.aut_from_json(scatter.aut_to_json(g0))
    assert back == g0 and back.ray == g0.ray


# -- scattering diagrams -------------------------------------------------------

def line(base, alpha, coeffs=None):
    e0 = (-alpha[0], -alpha[1])
    return Line(base, alpha, RayFunction(e0, 1, coeffs or {1: ONE}))


def test_single_line_does_not_scatter():
    d = scatter_chart(ScatteringDiagram(B, ONE, [line((0, 0), (1, 0))]), order=4)
    assert len(d.lines) == 1 and not d.vertices


@pytest.mark.parametrize("q", [ONE, Q])
def test_two_lines_produce_the_pentagon_ray(q):
    init = ScatteringDiagram(B, q, [line((0, -2), (0, 1)), line((-2, 0), (1, 0))])
    d = scatter_chart(init, order=6)
    assert len(d.lines) == 3 and len(d.vertices) == 1
    assert d.consistent()
    assert d.lines[2].alpha == (1, 1) and d.lines[2].base == (0, 0)


@pytest.mark.parametrize("q", [ONE, Q])
def test_three_lines_scatter_consistently(q):
    init = ScatteringDiagram(B, q, [line((0, -2), (0, 1)), line((-2, 0), (1, 0)),
                                    line((-3, -2), (1, 1))])
    d = scatter_chart(init, order=4)
    assert d.consistent()
    assert len(d.vertices) == 6 and len(d.lines) == 9
    generations = {l.generation for l in d.lines}
    assert generations == {"initial", "composite"}
    back = ScatteringDiagram.from_json(d.to_json())
    assert [l.alpha for l in back.lines] == [l.alpha for l in d.lines]


def test_collinear_lines_are_rejected():
    init = ScatteringDiagram(B, ONE, [line((0, 0), (1, 0)), line((1, 0), (1, 0))])
    with pytest.raises(scatter.CollinearCollision):
        scatter_chart(init, order=4)


def test_line_validation():
    with pytest.raises(ValueError):
        Line((0, 0), (2, 0), RayFunction((-2, 0), 1, {1: ONE}))
    with pytest.raises(ValueError):
        Line((0, 0), (1, 0), RayFunction((0, -1), 1, {1: ONE}))
