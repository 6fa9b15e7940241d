"""Wall-crossing automorphisms of the rank-2 quantum torus and their
ordered factorization.

Automorphisms are stored by the images of the generators ``xi = m(1, 0)`` and
``eta = m(0, 1)``.  A :class:`Grading` fixes two covectors ``alpha1, alpha2``;
a correction monomial ``m(v)`` with ``v = -(n1 alpha1 + n2 alpha2)`` has order
``n1 + n2`` and slope ``n2 / n1``.  Everything is truncated at a total order
``D``.

Group law: ``compose(phi, psi)`` substitutes ``psi``'s images into ``phi``'s
images, so as algebra maps it is ``psi o phi``.  Ordered products are read
left to right with this law, and :func:`factorize` returns factors in
ascending slope with ``compose(g_inf, g_0) == g_0 * ... * g_inf``.

Ray automorphisms.  For a primitive ``e0`` put ``z = m(e0)``,
``k(mu) = sign * det(e0, mu)`` and ``s = sign * omega_12`` where ``omega`` is
the commutation form.  Given a series ``f(z)`` with ``f(0) = 1``::

    m(mu)  ->  m(mu) * prod_{i=0}^{k(mu)-1} f(q**(s*i) * z)

(with inverted factors over ``i = k, ..., -1`` when ``k < 0``).  These maps
are algebra automorphisms fixing ``z`` and satisfy ``g_f g_h = g_{fh}``.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

from .qalg import TwistForm, TwistedElement, monomial_inverse, ordered_coefficient, qpow
from .scalars import LogNorm, Scalar

INF = math.inf
DEFAULT_ORDER = 6


class NotUnipotent(ValueError):
    pass


class NotExpressible(ValueError):
    pass


class CollinearCollision(ValueError):
    pass


def primitive(v: Sequence[int]) -> tuple:
    g = gcd(int(v[0]), int(v[1]))
    if g == 0:
        raise ValueError("zero vector")
    return (int(v[0]) // g, int(v[1]) // g)


def det2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def format_slope(lam) -> str:
    return "inf" if lam == INF else str(lam)


def parse_slope(s):
    if s is None:
        return None
    return INF if s in ("inf", INF) else Fraction(s)


@dataclass(frozen=True)
class Grading:
    """Expansion covectors ``alpha1, alpha2`` with ``alpha1 ^ alpha2 != 0``."""
    alpha1: tuple
    alpha2: tuple

    def __post_init__(self):
        object.__setattr__(self, "alpha1", tuple(int(x) for x in self.alpha1))
        object.__setattr__(self, "alpha2", tuple(int(x) for x in self.alpha2))
        if det2(self.alpha1, self.alpha2) == 0:
            raise CollinearCollision("grading covectors are collinear")

    @classmethod
    def standard(cls):
        return cls((1, 0), (0, 1))

    def coords(self, v) -> tuple:
        """``(n1, n2)`` with ``v = -(n1 alpha1 + n2 alpha2)``."""
        a, b = self.alpha1, self.alpha2
        d = det2(a, b)
        n1 = Fraction(-det2(v, b), d)
        n2 = Fraction(-det2(a, v), d)
        return n1, n2

    def order(self, v) -> Fraction:
        n1, n2 = self.coords(v)
        return n1 + n2

    def slope(self, v):
        n1, n2 = self.coords(v)
        if n1 < 0 or n2 < 0 or n1 == n2 == 0:
            raise NotExpressible(f"{v} is not a correction monomial")
        return INF if n1 == 0 else n2 / n1

    def ray(self, lam) -> tuple:
        """Primitive correction exponent ``e0`` of slope ``lam``."""
        if lam == INF:
            n1, n2 = Fraction(0), Fraction(1)
        else:
            lam = Fraction(lam)
            n1, n2 = Fraction(lam.denominator), Fraction(lam.numerator)
        v = tuple(-(n1 * x + n2 * y) for x, y in zip(self.alpha1, self.alpha2))
        den = 1
        for c in v:
            den = den * c.denominator // gcd(den, c.denominator)
        return primitive([int(c * den) for c in v])

    def to_json(self):
        return [list(self.alpha1), list(self.alpha2)]


def _truncate(f: TwistedElement, lead, grading: Grading, D) -> TwistedElement:
    base = grading.order(lead)
    keep = {}
    for w, c in f.terms.items():
        o = grading.order(w) - base
        if o < 0:
            raise NotUnipotent(f"term m{w} lies below m{tuple(lead)}")
        if o <= D:
            keep[w] = c
    return f.like(keep)


def _tmul(a: TwistedElement, b: TwistedElement, lead, grading: Grading, D) -> TwistedElement:
    """``a * b`` keeping only terms of order ``<= D`` above ``lead``; pairs are pruned before multiplying."""
    B, q = a.twist, a.q
    base = grading.order(lead)
    ob = [(mu, c, grading.order(mu)) for mu, c in b.terms.items()]
    out: dict = {}
    for lam, x in a.terms.items():
        ol = grading.order(lam) - base
        for mu, y, om in ob:
            o = ol + om
            if o > D:
                continue
            if o < 0:
                raise NotUnipotent(f"term below m{tuple(lead)}")
            nu = (lam[0] + mu[0], lam[1] + mu[1])
            c = x * y
            k = B(lam, mu)
            if k:
                c = c * qpow(q, k)
            out[nu] = out[nu] + c if nu in out else c
    return a.like({k: v for k, v in out.items() if v})


def _series_inverse(u: TwistedElement, grading: Grading, D) -> TwistedElement:
    """Inverse of ``1 + (positive order)`` by the geometric series."""
    zero = (0,) * u.dim
    one = u.mono(zero)
    if u.coeff(zero) != 1:
        raise NotUnipotent("constant term must be 1")
    y = one - u
    if y.is_zero():
        return one
    result, power = one, one
    while True:
        power = _tmul(power, y, zero, grading, D)
        if power.is_zero():
            return result
        result = result + power


@dataclass(frozen=True)
class RayFunction:
    """``f(z) = sum coeffs[j] z**j`` on the ray ``z = m(e0)``, with ``f(0) = 1``."""
    e0: tuple
    sign: int
    coeffs: tuple

    def __init__(self, e0, sign: int = 1, coeffs: Mapping[int, Scalar] | Iterable = ()):
        e0 = primitive(e0)
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        cs = tuple(sorted((int(j), c) for j, c in items if c))
        if any(j <= 0 for j, _ in cs):
            raise NotUnipotent("f must be 1 + higher powers of z")
        object.__setattr__(self, "e0", e0)
        object.__setattr__(self, "sign", sign)
        object.__setattr__(self, "coeffs", cs)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def k(self, mu) -> int:
        return self.sign * det2(self.e0, mu)

    def is_identity(self) -> bool:
        return not self.coeffs

    def to_json(self):
        return {"e0": list(self.e0), "sign": self.sign,
                "coeffs": [[j, c.to_json()] for j, c in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        return cls(data["e0"], data.get("sign", 1),
                   {int(j): Scalar.from_json(c) for j, c in data["coeffs"]})


class WallAutomorphism:
    """A unipotent automorphism, truncated at order ``D`` for ``grading``."""

    __slots__ = ("images", "grading", "order", "slope", "ray")

    def __init__(self, images: Sequence[TwistedElement], grading: Grading,
                 order: int = DEFAULT_ORDER, slope=None, ray: RayFunction | None = None,
                 check: bool = True):
        X, Y = images
        if X.dim != 2 or X.twist != Y.twist:
            raise ValueError("images must live in one rank-2 torus")
        self.grading = grading
        self.order = order
        X = _truncate(X, (1, 0), grading, order)
        Y = _truncate(Y, (0, 1), grading, order)
        self.images = (X, Y)
        self.slope = slope
        self.ray = ray
        if check:
            if X.coeff((1, 0)) != 1 or Y.coeff((0, 1)) != 1:
                raise NotUnipotent("leading terms must be xi and eta")
            if slope is not None:
                for lead, img in ((1, 0), X), ((0, 1), Y):
                    for w in img.terms:
                        v = (w[0] - lead[0], w[1] - lead[1])
                        if v != (0, 0) and grading.slope(v) != slope:
                            raise NotExpressible(f"m{v} is off the slope-{format_slope(slope)} ray")

    # basic data ----------------------------------------------------------
    @property
    def twist(self) -> TwistForm:
        return self.images[0].twist

    @property
    def q(self) -> Scalar:
        return self.images[0].q

    @classmethod
    def identity(cls, twist: TwistForm, q: Scalar, grading: Grading | None = None,
                 order: int = DEFAULT_ORDER) -> "WallAutomorphism":
        grading = grading or Grading.standard()
        X = TwistedElement.monomial(twist, q, (1, 0))
        return cls((X, X.mono((0, 1))), grading, order)

    def like(self, images, slope=None, ray=None) -> "WallAutomorphism":
        return WallAutomorphism(images, self.grading, self.order, slope, ray, check=False)

    def corrections(self) -> tuple:
        """``(u_xi, u_eta)`` with ``image(xi) = xi * u_xi`` and likewise for eta."""
        X, Y = self.images
        xi_inv = monomial_inverse(X.mono((1, 0)))
        eta_inv = monomial_inverse(X.mono((0, 1)))
        return xi_inv * X, eta_inv * Y

    def is_identity(self) -> bool:
        X, Y = self.images
        return X == X.mono((1, 0)) and Y == X.mono((0, 1))

    def __eq__(self, other):
        if not isinstance(other, WallAutomorphism):
            return NotImplemented
        return self.images[0] == other.images[0] and self.images[1] == other.images[1]

    def __repr__(self):
        return f"WallAutomorphism(xi -> {self.images[0]!r}, eta -> {self.images[1]!r})"

    def commutation_defect(self) -> TwistedElement:
        """``X Y - q**w Y X`` for images ``X, Y``; zero for a genuine automorphism."""
        X, Y = self.images
        w = self.twist.commutator_exponent((1, 0), (0, 1))
        lead = (1, 1)
        return _truncate(X * Y - (Y * X).scale(qpow(self.q, w)), lead, self.grading, self.order)

    # action --------------------------------------------------------------
    def inverse_images(self) -> tuple:
        u_x, u_y = self.corrections()
        X = self.images[0]
        out = []
        for u, e in ((u_x, (1, 0)), (u_y, (0, 1))):
            out.append(_tmul(_series_inverse(u, self.grading, self.order),
                             monomial_inverse(X.mono(e)), (-e[0], -e[1]), self.grading, self.order))
        return tuple(out)

    def apply(self, f: TwistedElement) -> TwistedElement:
        """Image of ``f``; each term is truncated relative to its own exponent."""
        X, Y = self.images
        inv = None
        g, D = self.grading, self.order
        powers: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                if k == 0:
                    r = X.mono((0, 0))
                else:
                    nonlocal inv
                    if k < 0 and inv is None:
                        inv = self.inverse_images()
                    step = (self.images if k > 0 else inv)[i]
                    prev = power(i, k - 1 if k > 0 else k + 1)
                    lead = [0, 0]
                    lead[i] = k
                    r = _tmul(prev, step, lead, g, D)
                powers[key] = r
            return powers[key]

        out = X.like({})
        for lam, c in f.terms.items():
            coef = c / ordered_coefficient(f.twist, f.q, lam)
            term = _tmul(power(0, lam[0]), power(1, lam[1]), lam, g, D)
            out = out + term.scale(coef)
        return out


def _check_compatible(phi: WallAutomorphism, psi: WallAutomorphism):
    if phi.twist != psi.twist or phi.q != psi.q:
        raise ValueError("twist mismatch")
    if phi.order != psi.order:
        raise ValueError("truncation order mismatch")
    if phi.grading != psi.grading:
        raise ValueError("grading mismatch")


def compose(phi: WallAutomorphism, psi: WallAutomorphism) -> WallAutomorphism:
    """Substitute ``psi``'s images into ``phi``'s images."""
    _check_compatible(phi, psi)
    images = tuple(psi.apply(img) for img in phi.images)
    slope = phi.slope if phi.slope == psi.slope else None
    if slope is None and phi.is_identity():
        slope = psi.slope
    elif slope is None and psi.is_identity():
        slope = phi.slope
    return phi.like(images, slope=slope)


def product(factors: Sequence[WallAutomorphism]) -> WallAutomorphism:
    if not factors:
        raise ValueError("empty product")
    out = factors[0]
    for g in factors[1:]:
        out = compose(out, g)
    return out


def _leading_part(phi: WallAutomorphism):
    """Minimal positive order ``k`` and the order-``k`` parts of the corrections."""
    u_x, u_y = phi.corrections()
    g = phi.grading
    best = None
    for u in (u_x, u_y):
        for v in u.terms:
            if v == (0, 0):
                continue
            o = g.order(v)
            if o <= 0:
                raise NotUnipotent(f"correction m{v} has order {o}")
            if best is None or o < best:
                best = o
    if best is None:
        return None, None, None
    parts = tuple(u.filter(lambda v: v != (0, 0) and g.order(v) == best) for u in (u_x, u_y))
    return best, parts[0], parts[1]


def invert(phi: WallAutomorphism) -> WallAutomorphism:
    """Order-by-order inverse: ``compose(phi, invert(phi))`` is the identity mod ``D + 1``."""
    phi.corrections()  # validates unipotence
    psi = WallAutomorphism.identity(phi.twist, phi.q, phi.grading, phi.order)
    while True:
        E = compose(phi, psi)
        k, dx, dy = _leading_part(E)
        if k is None:
            break
        X = phi.images[0]
        L = phi.like((X.mono((1, 0)) * (X.mono((0, 0)) - dx),
                      X.mono((0, 1)) * (X.mono((0, 0)) - dy)))
        psi = compose(psi, L)
    ray = None if phi.ray is None else invert_ray(phi.ray, phi.grading, phi.order)
    return phi.like(psi.images, slope=phi.slope, ray=ray)


# ----------------------------------------------------------------------
# one-variable series on a ray


def _ser_mul(a: dict, b: dict, J: int) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            if i + j <= J:
                out[i + j] = out[i + j] + x * y if i + j in out else x * y
    return {k: v for k, v in out.items() if v}


def _ser_inv(a: dict, J: int, unit: Scalar) -> dict:
    """Inverse of ``1 + ...`` up to degree ``J``."""
    inv = {0: unit}
    for n in range(1, J + 1):
        acc = None
        for j, c in a.items():
            if 0 < j <= n and n - j in inv:
                term = c * inv[n - j]
                acc = term if acc is None else acc + term
        if acc is not None and acc:
            inv[n] = -acc
    return inv


def _ray_degree(ray: RayFunction, grading: Grading, D) -> int:
    o = grading.order(ray.e0)
    if o <= 0:
        raise NotExpressible(f"ray {ray.e0} is not a correction direction")
    return int(Fraction(D) / o)


def _ray_series_inverse(ray: RayFunction, grading: Grading, D) -> dict:
    J = _ray_degree(ray, grading, D)
    if not ray.coeffs:
        return {}
    unit = ray.coeffs[0][1].coerce(1)
    inv = _ser_inv(dict(ray.coeffs, **{}) | {0: unit}, J, unit)
    return {j: c for j, c in inv.items() if j > 0}


def invert_ray(ray: RayFunction, grading: Grading, D) -> RayFunction:
    """``g_f^{-1} = g_{1/f}``."""
    return RayFunction(ray.e0, ray.sign, _ray_series_inverse(ray, grading, D))


def _omega12(twist: TwistForm) -> int:
    return twist.commutator_exponent((1, 0), (0, 1))


def ray_factor(ray: RayFunction, k: int, q: Scalar, s: int, J: int) -> dict:
    """Series ``P_k(z)`` multiplying ``m(mu)`` when ``k(mu) = k``."""
    unit = q.coerce(1)
    out = {0: unit}
    if k == 0 or not ray.coeffs:
        return out
    rng = range(0, k) if k > 0 else range(k, 0)
    for i in rng:
        shifted = {0: unit}
        for j, c in ray.coeffs:
            if j <= J:
                shifted[j] = c * qpow(q, s * i * j)
        if k < 0:
            shifted = _ser_inv(shifted, J, unit)
        out = _ser_mul(out, shifted, J)
    return out


def ray_automorphism(ray: RayFunction, twist: TwistForm, q: Scalar,
                     grading: Grading | None = None,
                     order: int = DEFAULT_ORDER) -> WallAutomorphism:
    grading = grading or Grading.standard()
    J = _ray_degree(ray, grading, order)
    s = ray.sign * _omega12(twist)
    z = TwistedElement.monomial(twist, q, ray.e0)
    zpow = [z.mono((0, 0))]
    for _ in range(J):
        zpow.append(zpow[-1] * z)
    images = []
    for e in ((1, 0), (0, 1)):
        series = ray_factor(ray, ray.k(e), q, s, J)
        u = z.like({})
        for j, c in series.items():
            u = u + zpow[j].scale(c)
        images.append(z.mono(e) * u)
    slope = grading.slope(ray.e0)
    return WallAutomorphism(images, grading, order, slope=slope, ray=ray)


def wall_aut(alpha: Sequence[int], corrections: Mapping[int, Scalar] | Iterable,
             twist: TwistForm, q: Scalar, grading: Grading | None = None,
             order: int = DEFAULT_ORDER, sign: int = 1) -> WallAutomorphism:
    """Wall for covector ``alpha``: ``f(z) = 1 + sum c_j z**j`` with ``z = m(-alpha)``.

    ``wall_aut((0, 1), {1: 1}, ...)`` is ``(xi (1 + eta**-1), eta)``; the
    mirror wall ``(xi, eta (1 + xi**-1))`` is ``wall_aut((1, 0), {1: 1}, sign=-1)``.
    """
    alpha = tuple(int(a) for a in alpha)
    if primitive(alpha) != alpha:
        raise ValueError("covector must be primitive")
    if isinstance(corrections, Mapping):
        corrections = corrections.items()
    coeffs = {int(j): q.coerce(c) if not isinstance(c, Scalar) else c for j, c in corrections}
    ray = RayFunction((-alpha[0], -alpha[1]), sign, coeffs)
    return ray_automorphism(ray, twist, q, grading, order)


def transport(phi: WallAutomorphism, C: Scalar, mu: Sequence[int] = (0, 1)) -> WallAutomorphism:
    """Conjugate by ``m(w) -> C**<mu, w> m(w)`` (for ``mu = (0, 1)``: ``eta -> C eta``).

    A correction ``m(v)`` of a generator is rescaled by ``C**-<mu, v>``.
    """
    if not C.lognorm() < 0:
        raise ValueError("transport needs |C| < 1")
    out = []
    for e, img in zip(((1, 0), (0, 1)), phi.images):
        base = mu[0] * e[0] + mu[1] * e[1]
        out.append(img.map_terms(
            lambda w, c, base=base: (w, c * C ** (base - mu[0] * w[0] - mu[1] * w[1]))))
    ray = None
    if phi.ray is not None:
        k = -(mu[0] * phi.ray.e0[0] + mu[1] * phi.ray.e0[1])
        ray = RayFunction(phi.ray.e0, phi.ray.sign,
                          {j: c * C ** (k * j) for j, c in phi.ray.coeffs})
    return phi.like(out, slope=phi.slope, ray=ray)


# ----------------------------------------------------------------------
# factorization


def _qsum(q: Scalar, k: int, s: int, j: int) -> Scalar:
    """Linear coefficient of ``P_k`` per unit of ``c z**j`` in ``f``."""
    if k >= 0:
        idx, sgn = range(0, k), 1
    else:
        idx, sgn = range(k, 0), -1
    acc = q.coerce(0)
    for i in idx:
        acc = acc + qpow(q, s * i * j)
    return acc * sgn


@dataclass
class Factorization:
    """Ordered factors ``slope -> RayFunction`` in ascending slope."""
    factors: dict
    twist: TwistForm
    q: Scalar
    grading: Grading
    order: int
    target: WallAutomorphism = field(repr=False)

    def slopes(self) -> list:
        return sorted(self.factors)

    def automorphisms(self) -> list:
        return [ray_automorphism(self.factors[lam], self.twist, self.q, self.grading, self.order)
                for lam in self.slopes()]

    def product(self) -> WallAutomorphism:
        auts = self.automorphisms()
        if not auts:
            return WallAutomorphism.identity(self.twist, self.q, self.grading, self.order)
        return product(auts)

    def inverse_product(self) -> WallAutomorphism:
        """``P^{-1}`` as the reversed product of exact ray inverses."""
        auts = [ray_automorphism(invert_ray(self.factors[lam], self.grading, self.order),
                                 self.twist, self.q, self.grading, self.order)
                for lam in reversed(self.slopes())]
        if not auts:
            return WallAutomorphism.identity(self.twist, self.q, self.grading, self.order)
        return product(auts)

    def residual(self) -> WallAutomorphism:
        """``P^{-1} T``; the identity when the factorization is exact."""
        return compose(self.inverse_product(), self.target)

    def to_json(self):
        return {"order": self.order, "grading": self.grading.to_json(),
                "factors": [{"slope": format_slope(lam), **self.factors[lam].to_json()}
                            for lam in self.slopes()]}


def default_sign(grading: Grading, lam) -> int:
    """Orientation used for new rays: always ``+1``."""
    return 1


def factorize(g0: WallAutomorphism, ginf: WallAutomorphism, order: int | None = None,
              sign_rule=default_sign) -> Factorization:
    """Factor ``compose(ginf, g0)`` as an ascending-slope product of ray automorphisms."""
    _check_compatible(g0, ginf)
    for g, lam in ((g0, 0), (ginf, INF)):
        if not g.is_identity() and g.slope != lam:
            raise NotExpressible(f"input wall must carry slope {format_slope(lam)}")
    grading, q, twist = g0.grading, g0.q, g0.twist
    D = g0.order if order is None else order
    if D != g0.order:
        g0 = _regrade(g0, grading, D)
        ginf = _regrade(ginf, grading, D)
    T = compose(ginf, g0)
    omega = _omega12(twist)
    signs = {}
    for g, lam in ((g0, 0), (ginf, INF)):
        if g.ray is not None:
            signs[lam] = g.ray.sign
    coeffs: dict = {}
    result = Factorization({}, twist, q, grading, D, T)
    while True:
        result.factors = {lam: RayFunction(grading.ray(lam), signs.get(lam) or sign_rule(grading, lam), c)
                          for lam, c in coeffs.items() if c}
        E = compose(result.inverse_product(), T)
        k, dx, dy = _leading_part(E)
        if k is None:
            return result
        found: dict = {}
        for which, part in enumerate((dx, dy)):
            for v, gamma in part.terms.items():
                lam = grading.slope(v)
                e0 = grading.ray(lam)
                j = v[0] // e0[0] if e0[0] else v[1] // e0[1]
                # m(j e0) = q**-(B(e0,e0) j(j-1)/2) z**j
                gamma = gamma / qpow(q, twist(e0, e0) * j * (j - 1) // 2)
                found.setdefault((lam, j), [q.coerce(0), q.coerce(0)])[which] = gamma
        for (lam, j), gam in sorted(found.items()):
            sign = signs.setdefault(lam, sign_rule(grading, lam))
            ray = RayFunction(grading.ray(lam), sign)
            s = sign * omega
            c = None
            for which, e in enumerate(((1, 0), (0, 1))):
                qs = _qsum(q, ray.k(e), s, j)
                if qs:
                    c = gam[which] / qs
                    break
            if c is None:
                raise NotExpressible(f"slope {format_slope(lam)} moves no generator")
            for which, e in enumerate(((1, 0), (0, 1))):
                if gam[which] != c * _qsum(q, ray.k(e), s, j):
                    raise NotExpressible(
                        f"order-{k} discrepancy at slope {format_slope(lam)} is not a ray automorphism")
            J = _ray_degree(ray, grading, D)
            cur = {0: q.coerce(1)}
            cur.update(coeffs.get(lam, {}))
            cur = _ser_mul(cur, {0: q.coerce(1), j: c}, J)
            coeffs[lam] = {i: x for i, x in cur.items() if i > 0}


def _regrade(phi: WallAutomorphism, grading: Grading, D) -> WallAutomorphism:
    if phi.ray is not None:
        return ray_automorphism(phi.ray, phi.twist, phi.q, grading, D)
    return WallAutomorphism(phi.images, grading, D, phi.slope)


# ----------------------------------------------------------------------
# angle regions and JSON


@dataclass(frozen=True)
class AngleRegion:
    """Closed angle at ``base`` spanned by covectors with ``alpha1 ^ alpha2 > 0``."""
    base: tuple
    alpha1: tuple
    alpha2: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(Fraction(x) for x in self.base))
        object.__setattr__(self, "alpha1", tuple(int(x) for x in self.alpha1))
        object.__setattr__(self, "alpha2", tuple(int(x) for x in self.alpha2))
        if det2(self.alpha1, self.alpha2) <= 0:
            raise ValueError("need alpha1 ^ alpha2 > 0")

    @property
    def grading(self) -> Grading:
        return Grading(self.alpha1, self.alpha2)

    def excess(self, v, c: Scalar) -> LogNorm:
        """``log|c| - <n1 alpha1 + n2 alpha2, base>`` for the correction ``c m(v)``."""
        n1, n2 = self.grading.coords(v)
        pair = sum((n1 * a + n2 * b) * x for a, b, x in zip(self.alpha1, self.alpha2, self.base))
        return c.lognorm() - pair if c else c.lognorm()

    def bound_holds(self, phi: WallAutomorphism) -> bool:
        for u in phi.corrections():
            for v, c in u.terms.items():
                if v != (0, 0):
                    e = self.excess(v, c)
                    if not isinstance(e, Fraction) and not isinstance(e, int):
                        continue
                    if e > 0:
                        return False
        return True


def aut_to_json(phi: WallAutomorphism) -> dict:
    out = {"grading": phi.grading.to_json(), "order": phi.order,
           "images": [img.to_json() for img in phi.images],
           "slope": None if phi.slope is None else format_slope(phi.slope)}
    if phi.ray is not None:
        out["ray"] = phi.ray.to_json()
    return out


def aut_from_json(data: dict) -> WallAutomorphism:
    grading = Grading(*data.get("grading", [[1, 0], [0, 1]]))
    order = int(data.get("order", DEFAULT_ORDER))
    slope = parse_slope(data.get("slope"))
    ray = RayFunction.from_json(data["ray"]) if data.get("ray") else None
    images = [TwistedElement.from_json(x) for x in data["images"]]
    return WallAutomorphism(images, grading, order, slope, ray)


# ----------------------------------------------------------------------
# scattering in a chart


@dataclass
class Line:
    """The ray ``base + s * alpha`` (``s >= 0``) carrying a wall for ``alpha``."""
    base: tuple
    alpha: tuple
    ray: RayFunction
    generation: str = "initial"
    weight: Fraction = Fraction(1)
    birth: Fraction = Fraction(0)

    def __post_init__(self):
        self.base = tuple(Fraction(x) for x in self.base)
        self.alpha = tuple(int(x) for x in self.alpha)
        self.weight = Fraction(self.weight)
        if primitive(self.alpha) != self.alpha:
            raise ValueError("line covector must be primitive")
        if self.ray.e0 != (-self.alpha[0], -self.alpha[1]):
            raise ValueError("wall function must live on m(-alpha)")

    def to_json(self):
        return {"base": [str(x) for x in self.base], "alpha": list(self.alpha),
                "generation": self.generation, "weight": str(self.weight),
                "birth": str(self.birth), "wall": self.ray.to_json()}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(Fraction(x) for x in data["base"]), tuple(data["alpha"]),
                   RayFunction.from_json(data["wall"]), data.get("generation", "initial"),
                   Fraction(data.get("weight", 1)), Fraction(data.get("birth", "0")))


@dataclass
class Vertex:
    point: tuple
    incoming: tuple
    outgoing: tuple
    consistent: bool

    def to_json(self):
        return {"point": [str(x) for x in self.point], "incoming": list(self.incoming),
                "outgoing": list(self.outgoing), "consistent": self.consistent}


@dataclass
class ScatteringDiagram:
    twist: TwistForm
    q: Scalar
    lines: list
    vertices: list = field(default_factory=list)

    def to_json(self):
        return {"twist": [list(r) for r in self.twist.matrix], "q": self.q.to_json(),
                "lines": [l.to_json() for l in self.lines],
                "vertices": [v.to_json() for v in self.vertices]}

    @classmethod
    def from_json(cls, data):
        return cls(TwistForm(data["twist"]), Scalar.from_json(data["q"]),
                   [Line.from_json(l) for l in data["lines"]])

    def consistent(self) -> bool:
        return all(v.consistent for v in self.vertices)


def _intersect(l1: Line, l2: Line):
    """Parameters ``(s1, s2)`` of the crossing point, ``None`` if parallel and disjoint."""
    a, b = l1.alpha, l2.alpha
    d = det2(a, b)
    diff = tuple(y - x for x, y in zip(l1.base, l2.base))
    if d == 0:
        if det2(diff, a) == 0:
            raise CollinearCollision("collinear lines overlap")
        return None
    # l1.base + s1 a = l2.base + s2 b
    s1 = Fraction(det2(diff, b), d)
    s2 = Fraction(det2(diff, a), d)
    return s1, s2


def scatter_chart(initial: ScatteringDiagram, order: int = DEFAULT_ORDER) -> ScatteringDiagram:
    """Resolve pairwise collisions in order of occurrence, adding composite lines.

    A line of weight ``w`` (initial lines have ``w = 1``; a line born with
    covector ``n1 alpha1 + n2 alpha2`` has ``w = n1 w1 + n2 w2``, rational
    when the colliding covectors span a proper sublattice) keeps the
    powers ``z**j`` of its wall function with ``j * w <= order``.  Collisions
    are scheduled by ``max(birth + s)`` over the two lines, ties broken by the
    lexicographic order of the point.
    """
    twist, q = initial.twist, initial.q
    lines = [Line(l.base, l.alpha, _clip(l.ray, l.weight, order), l.generation,
                  l.weight, l.birth) for l in initial.lines]
    vertices = []
    heap: list = []
    seen = set()

    def schedule(i, j):
        hit = _intersect(lines[i], lines[j])
        if hit is None:
            return
        s1, s2 = hit
        if s1 <= 0 or s2 <= 0:
            if not (s1 >= 0 and s2 >= 0 and (s1 > 0 or s2 > 0)):
                return
            # a line may start on another one; only its birth point is excluded
            if (s1 == 0 and lines[i].generation == "composite") or \
               (s2 == 0 and lines[j].generation == "composite"):
                return
        p = tuple(x + s1 * a for x, a in zip(lines[i].base, lines[i].alpha))
        key = max(lines[i].birth + s1, lines[j].birth + s2)
        heapq.heappush(heap, (key, p, i, j))

    for i in range(len(lines)):
        for j in range(i):
            schedule(j, i)
    while heap:
        key, p, i, j = heapq.heappop(heap)
        if (i, j) in seen:
            continue
        seen.add((i, j))
        l1, l2 = lines[i], lines[j]
        if det2(l1.alpha, l2.alpha) < 0:
            l1, l2 = l2, l1
            i, j = j, i
        w1, w2 = l1.weight, l2.weight
        D_loc = Fraction(order) / min(w1, w2)
        grading = Grading(l1.alpha, l2.alpha)
        g0 = ray_automorphism(l1.ray, twist, q, grading, D_loc)
        ginf = ray_automorphism(l2.ray, twist, q, grading, D_loc)
        F = factorize(g0, ginf)
        born = []
        for lam, ray in F.factors.items():
            if lam in (0, INF):
                continue
            n1, n2 = grading.coords(ray.e0)
            alpha = (-ray.e0[0], -ray.e0[1])
            w = n1 * w1 + n2 * w2
            if w > order:
                continue
            ray = _clip(ray, w, order)
            if ray.is_identity():
                continue
            lines.append(Line(p, alpha, ray, "composite", w, key))
            born.append(len(lines) - 1)
        consistent = _vertex_consistent(F, l1, l2, born, lines, grading, twist, q, order)
        vertices.append(Vertex(p, (i, j), tuple(born), consistent))
        for k in born:
            for m in range(k):
                schedule(m, k)
    return ScatteringDiagram(twist, q, lines, vertices)


def _clip(ray: RayFunction, weight: int, order: int) -> RayFunction:
    return RayFunction(ray.e0, ray.sign, {j: c for j, c in ray.coeffs if j * weight <= order})


def _vertex_consistent(F: Factorization, l1: Line, l2: Line, born, lines, grading,
                       twist, q, order) -> bool:
    """Loop product around the vertex, using the walls actually stored on the lines.

    Factors are truncated at the global weight bound, so the check runs at
    the local order of the lightest incoming line rescaled to that bound.
    """
    D_loc = Fraction(order) / max(l1.weight, l2.weight)
    auts = [ray_automorphism(l1.ray, twist, q, grading, D_loc)]
    for k in sorted(born, key=lambda k: grading.slope(lines[k].ray.e0)):
        auts.append(ray_automorphism(lines[k].ray, twist, q, grading, D_loc))
    auts.append(ray_automorphism(l2.ray, twist, q, grading, D_loc))
    g0 = auts[0]
    ginf = auts[-1]
    P = product(auts)
    T = compose(ginf, g0)
    return compose(invert(P), T).is_identity()
