"""Local model of the quantum K3 singularity.

The algebra ``A_q(S)`` has generators ``alpha, beta, gamma`` (letters 1, 2, 3
of a free algebra) and four relations.  Three torus charts map into it:

    g1 = (xi**-1,               xi (1 + eta),  eta**-1)
    g2 = ((1 + eta) xi**-1,      xi,            eta**-1)
    g3 = ((1 + eta) (xi eta)**-1, xi eta,       eta**-1)

Read literally, the orientation of the ``q``-commutation relations does not
make all three maps homomorphisms.  :func:`select_conventions` expands every
relation for each of the eight orientation choices and returns those under
which all residuals vanish; the unique survivor is :data:`CONVENTION`::

    xi eta = q eta xi,   alpha gamma = q gamma alpha,   gamma beta = q beta gamma

together with ``beta alpha - q alpha beta = 1 - q`` and
``(alpha beta - 1) gamma = 1``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .qalg import FreeElement, TwistForm, TwistedElement, monomial_inverse, substitute
from .scalars import BOTTOM, Scalar
from .scatter import Grading, WallAutomorphism, compose, invert, wall_aut
from .spectra import MonomialPoint
from .sheaf import stalk_lognorm

EPSILON = Fraction(1, 2)

ALPHA, BETA, GAMMA = 1, 2, 3


class OutsideRegion(ValueError):
    pass


class NotInImage(ValueError):
    pass


# ----------------------------------------------------------------------
# presentation


@dataclass(frozen=True)
class Convention:
    """Orientation flags.  ``True`` means the relation as printed."""
    xi_eta: bool = True        # xi eta = q eta xi (else eta xi = q xi eta)
    alpha_gamma: bool = True   # alpha gamma = q gamma alpha (else gamma alpha = q alpha gamma)
    beta_gamma: bool = True    # beta gamma = q gamma beta (else gamma beta = q beta gamma)

    def describe(self) -> dict:
        return {
            "torus": "xi*eta = q*eta*xi" if self.xi_eta else "eta*xi = q*xi*eta",
            "alpha_gamma": "alpha*gamma = q*gamma*alpha" if self.alpha_gamma
            else "gamma*alpha = q*alpha*gamma",
            "beta_gamma": "beta*gamma = q*gamma*beta" if self.beta_gamma
            else "gamma*beta = q*beta*gamma",
        }


CONVENTION = Convention(xi_eta=True, alpha_gamma=True, beta_gamma=False)


def _w(*letters, coeff=1):
    return FreeElement.word(3, *letters, coeff=coeff)


@dataclass
class KThreePresentation:
    q: Scalar
    convention: Convention = CONVENTION

    def relations(self) -> list:
        """The four relations as ``lhs - rhs`` in the free algebra on alpha, beta, gamma."""
        q = self.q
        one = q.coerce(1)
        cv = self.convention
        if cv.alpha_gamma:
            r1 = _w(ALPHA, GAMMA, coeff=one) - _w(GAMMA, ALPHA, coeff=q)
        else:
            r1 = _w(GAMMA, ALPHA, coeff=one) - _w(ALPHA, GAMMA, coeff=q)
        if cv.beta_gamma:
            r2 = _w(BETA, GAMMA, coeff=one) - _w(GAMMA, BETA, coeff=q)
        else:
            r2 = _w(GAMMA, BETA, coeff=one) - _w(BETA, GAMMA, coeff=q)
        r3 = (_w(BETA, ALPHA, coeff=one) - _w(ALPHA, BETA, coeff=q)
              - FreeElement(3, {(): one - q}))
        r4 = (_w(ALPHA, BETA, GAMMA, coeff=one) - _w(GAMMA, coeff=one)
              - FreeElement(3, {(): one}))
        return [r1, r2, r3, r4]

    def twist(self) -> TwistForm:
        return chart_twist(self.convention)

    def specialize(self) -> "KThreePresentation":
        """``q = 1`` (``t = 0``): the commutative surface ``(alpha beta - 1) gamma = 1``."""
        return KThreePresentation(Scalar.const(1, self.q.precision), self.convention)


def chart_twist(cv: Convention) -> TwistForm:
    # ordered form: m(a, b) = xi**a eta**b
    return TwistForm.ordered([[0, 1], [-1, 0]] if cv.xi_eta else [[0, -1], [1, 0]])


# ----------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class Region:
    """Union of convex pieces; each piece is a list of strict inequalities
    ``a x + b y < c`` given as ``(a, b, c)``."""
    name: str
    pieces: tuple

    def contains(self, x, y, closed: bool = False) -> bool:
        x, y = Fraction(x), Fraction(y)
        if closed:
            return any(all(a * x + b * y <= c for a, b, c in piece) for piece in self.pieces)
        return any(all(a * x + b * y < c for a, b, c in piece) for piece in self.pieces)

    def __and__(self, other: "Region") -> "Region":
        return Region(f"{self.name}&{other.name}",
                      tuple(p + r for p in self.pieces for r in other.pieces))

    def to_json(self):
        return {"name": self.name,
                "pieces": [[[str(a), str(b), str(c)] for a, b, c in p] for p in self.pieces]}


def regions(eps: Fraction = EPSILON) -> dict:
    eps = Fraction(eps)
    return {
        # x < eps |y|
        "U1": Region("U1", (((1, -eps, 0),), ((1, eps, 0),))),
        "U2": Region("U2", (((-1, 0, 0), (-eps, 1, 0)),)),
        "U2'": Region("U2'", (((-1, 0, 0), (-eps / (1 + eps), 1, 0)),)),
        "U3": Region("U3", (((-1, 0, 0), (0, -1, 0)),)),
    }


@dataclass
class ChartModel:
    index: int
    region: Region
    images: tuple

    @property
    def twist(self) -> TwistForm:
        return self.images[0].twist


def chart(index: int, q: Scalar, convention: Convention = CONVENTION,
          eps: Fraction = EPSILON) -> ChartModel:
    B = chart_twist(convention)
    one = TwistedElement.monomial(B, q, (0, 0))
    xi = one.mono((1, 0))
    eta = one.mono((0, 1))
    xi_inv = monomial_inverse(xi)
    eta_inv = monomial_inverse(eta)
    U = regions(eps)
    if index == 1:
        images = (xi_inv, xi * (one + eta), eta_inv)
        region = U["U1"]
    elif index == 2:
        images = ((one + eta) * xi_inv, xi, eta_inv)
        region = U["U2'"]
    elif index == 3:
        xe = xi * eta
        images = ((one + eta) * monomial_inverse(xe), xe, eta_inv)
        region = U["U3"]
    else:
        raise ValueError("chart index must be 1, 2 or 3")
    return ChartModel(index, region, images)


def evaluate_relation(r: FreeElement, images: Sequence[TwistedElement]) -> TwistedElement:
    out = images[0].like({})
    one = images[0].mono((0, 0))
    for word, c in r.terms.items():
        term = one
        for letter in word:
            term = term * images[letter - 1]
        out = out + term.scale(c)
    return out


def verify_chart_homomorphism(ch: ChartModel, pres: KThreePresentation) -> list:
    """Residuals of the four relations after substituting the chart images (exact)."""
    if ch.twist != pres.twist():
        raise ValueError("chart and presentation use different torus conventions")
    return [evaluate_relation(r, ch.images) for r in pres.relations()]


def select_conventions(q: Scalar) -> list:
    """All orientation choices under which every chart is a homomorphism."""
    good = []
    for flags in itertools.product((True, False), repeat=3):
        cv = Convention(*flags)
        pres = KThreePresentation(q, cv)
        if all(r.is_zero() for i in (1, 2, 3)
               for r in verify_chart_homomorphism(chart(i, q, cv), pres)):
            good.append(cv)
    return good


# ----------------------------------------------------------------------
# tropical maps


def _chart_point(ch: ChartModel, x, y) -> tuple:
    """Points of the closed region are accepted; the formulas extend continuously."""
    x, y = Fraction(x), Fraction(y)
    if not ch.region.contains(x, y, closed=True):
        raise OutsideRegion(f"({x}, {y}) is not in {ch.region.name}")
    return x, y


def map_f(point: MonomialPoint | Sequence, ch: ChartModel) -> tuple:
    """``(max(0, log|alpha|), max(0, log|beta|), log|gamma|)`` at a monomial point."""
    x = point.x if isinstance(point, MonomialPoint) else tuple(point)
    x = _chart_point(ch, *x)
    la, lb, lc = (stalk_lognorm(img, x) for img in ch.images)
    if BOTTOM in (la, lb, lc):
        raise ValueError("a generator image vanishes")
    return (max(Fraction(0), la), max(Fraction(0), lb), lc)


def embed_j(x, y) -> tuple:
    x, y = Fraction(x), Fraction(y)
    if x <= 0:
        return (-x, max(x + y, Fraction(0)), -y)
    return (Fraction(0), x + max(y, Fraction(0)), -y)


def project_pi(value: Sequence) -> tuple:
    """``j**-1`` on the image of ``j``."""
    a, b, c = (Fraction(v) for v in value)
    y = -c
    x = -a if a > 0 else b - max(y, Fraction(0))
    if embed_j(x, y) != (a, b, c):
        raise NotInImage(f"{tuple(map(str, (a, b, c)))} is not in the image of j")
    return (x, y)


def chart_projection(ch: ChartModel, x, y) -> tuple:
    """``pi_i`` in chart coordinates ``(x, y) = (log|xi|, log|eta|)``."""
    x, y = _chart_point(ch, x, y)
    if ch.index == 2 and y >= 0:
        return (x - y, y)
    return (x, y)


@dataclass
class SweepReport:
    chart: int
    points: int
    failures: list
    branches: dict

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {"chart": self.chart, "points": self.points, "ok": self.ok,
                "branches": self.branches,
                "failures": [[str(v) for v in p] for p in self.failures]}


def grid(ch: ChartModel, n: int, lo=-6, hi=6) -> list:
    """Rational ``n x n`` grid on ``[lo, hi]**2`` restricted to the chart region."""
    step = Fraction(hi - lo, max(n - 1, 1))
    pts = []
    for i in range(n):
        for k in range(n):
            # small irrational-looking offset keeps points off region boundaries
            x = lo + i * step + Fraction(1, 7)
            y = lo + k * step + Fraction(1, 11)
            if ch.region.contains(x, y):
                pts.append((x, y))
    return pts


def compatibility_sweep(ch: ChartModel, points: Iterable) -> SweepReport:
    """``j(pi_i(x, y)) == f(g_i(x, y))`` at every point."""
    failures = []
    branches = {"j_left": 0, "j_right": 0, "pi2_shifted": 0, "pi2_plain": 0}
    count = 0
    for x, y in points:
        count += 1
        px, py = chart_projection(ch, x, y)
        branches["j_left" if px <= 0 else "j_right"] += 1
        if ch.index == 2:
            branches["pi2_shifted" if Fraction(y) >= 0 else "pi2_plain"] += 1
        lhs = embed_j(px, py)
        rhs = map_f((x, y), ch)
        if lhs != rhs or project_pi(rhs) != (px, py):
            failures.append((x, y))
    return SweepReport(ch.index, count, failures, branches)


# ----------------------------------------------------------------------
# gluing


def gluing_automorphism(overlap: str, q: Scalar, order: int = 6,
                        convention: Convention = CONVENTION) -> WallAutomorphism:
    """``(xi (1 + eta), eta)`` on U1&U2, ``(xi (1 + 1/eta), eta)`` on U1&U3."""
    B = chart_twist(convention)
    if overlap == "12":
        # corrections are positive powers of eta
        return wall_aut((0, -1), {1: 1}, B, q, Grading((1, 0), (0, -1)), order, sign=-1)
    if overlap == "13":
        return wall_aut((0, 1), {1: 1}, B, q, Grading((1, 0), (0, 1)), order)
    raise ValueError("overlap must be '12' or '13'")


def identification_23(q: Scalar, convention: Convention = CONVENTION):
    """Maps for ``(xi2, eta2) = (xi3 eta3, eta3)`` and its inverse."""
    B = chart_twist(convention)
    one = TwistedElement.monomial(B, q, (0, 0))
    xi, eta = one.mono((1, 0)), one.mono((0, 1))
    eta_inv = monomial_inverse(eta)
    forward = (xi * eta, eta)
    backward = (xi * eta_inv, eta)
    inv_forward = (monomial_inverse(xi * eta), eta_inv)
    inv_backward = (monomial_inverse(xi * eta_inv), eta_inv)
    return (forward, inv_forward), (backward, inv_backward)


def _certify_unit(one_plus: TwistedElement, small: TwistedElement, x, D: int) -> bool:
    """``1 + s`` with ``log|s| < 0`` at ``x``: the truncated geometric series
    ``sum_{k<=D} (-s)**k`` inverts it up to ``s**(D+1)``, whose log-norm is
    ``(D+1) log|s| < 0``."""
    ls = stalk_lognorm(small, x)
    if ls is BOTTOM or ls >= 0 or stalk_lognorm(one_plus, x) != 0:
        return False
    inv = one_plus.mono((0, 0))
    power = inv
    for _ in range(D):
        power = power * (-small)
        inv = inv + power
    err = one_plus * inv - one_plus.mono((0, 0))
    return stalk_lognorm(err, x) == (D + 1) * ls


@dataclass
class GlueReport:
    overlap: str
    commutation_exact: bool
    invertible_to_order: bool
    chart_transition: bool
    certified_points: int
    sampled_points: int
    identification_roundtrip: bool | None = None

    @property
    def ok(self) -> bool:
        return (self.commutation_exact and self.invertible_to_order and self.chart_transition
                and self.certified_points == self.sampled_points
                and self.identification_roundtrip is not False)

    def to_json(self):
        return {"overlap": self.overlap, "ok": self.ok,
                "commutation_exact": self.commutation_exact,
                "invertible_to_order": self.invertible_to_order,
                "chart_transition": self.chart_transition,
                "certified_points": self.certified_points,
                "sampled_points": self.sampled_points,
                "identification_roundtrip": self.identification_roundtrip}


def _transition_ok(phi: WallAutomorphism, source: ChartModel, target: ChartModel) -> bool:
    """Substituting ``phi`` into the source chart's images recovers the target chart's."""
    g = phi.grading
    for a, b in zip(source.images, target.images):
        lead = min(b.terms, key=g.order)
        diff = phi.apply(a) - b
        if any(g.order(w) - g.order(lead) <= phi.order for w in diff.terms):
            return False
    return True


def glue_automorphism_check(overlap: str, q: Scalar, order: int = 6, samples: int = 12,
                            convention: Convention = CONVENTION,
                            eps: Fraction = EPSILON) -> GlueReport:
    phi = gluing_automorphism(overlap, q, order, convention)
    commutation = phi.commutation_defect().is_zero()
    inverse_ok = compose(phi, invert(phi)).is_identity()
    U = regions(eps)
    other = {"12": 2, "13": 3}[overlap]
    region = U["U1"] & (U["U2"] if overlap == "12" else U["U3"])
    c1 = chart(1, q, convention, eps)
    transition = _transition_ok(phi, chart(other, q, convention, eps), c1)
    B = chart_twist(convention)
    one = TwistedElement.monomial(B, q, (0, 0))
    eta = one.mono((0, 1))
    small = eta if overlap == "12" else monomial_inverse(eta)
    pts = []
    for i in range(1, 40):
        for k in range(-40, 40):
            x, y = Fraction(i, 7), Fraction(k, 3)
            if region.contains(x, y):
                pts.append((x, y))
    pts = pts[:: max(1, len(pts) // samples)][:samples]
    certified = sum(_certify_unit(one + small, small, p, order) for p in pts)
    report = GlueReport(overlap, commutation, inverse_ok, transition, certified, len(pts))
    return report


def identification_roundtrip(q: Scalar, convention: Convention = CONVENTION) -> bool:
    """``(xi2, eta2) -> (xi3, eta3) -> back`` is the identity, and both maps keep
    the ``q``-commutation of the generators."""
    (fwd, inv_fwd), (bwd, inv_bwd) = identification_23(q, convention)
    B = chart_twist(convention)
    one = TwistedElement.monomial(B, q, (0, 0))
    ok = True
    for gen in (one.mono((1, 0)), one.mono((0, 1)), one.mono((-1, 2))):
        once = substitute(gen, fwd, inv_fwd)
        back = substitute(once, bwd, inv_bwd)
        ok &= back == gen
    w = B.commutator_exponent((1, 0), (0, 1))
    for X, Y in (fwd, bwd):
        ok &= (X * Y - (Y * X).scale(q ** w)).is_zero()
    return ok
