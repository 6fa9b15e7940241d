"""Sections of the canonical sheaf over rational polyhedra, and the
SL(n, Z) x| (K^x)^n transition action.

Conventions
-----------
Exponents ``I`` are column vectors and :func:`transform_section` applies the
monomial rule exactly as written::

    z**I  ->  (prod_i lambda_i**I_i) * z**(A I)

That rule is the action of the *inverse* group element.  The affine map on
the base is ``x -> A^T x - val(lambda)``; with ``A`` acting on exponents by
columns, ``A^T`` is the induced action on points, and for the identity or a
symmetric ``A`` it is literally ``A(x) - val(lambda)``.  Norms then satisfy
the pullback identity::

    stalk(transform_section(g, f), x) == stalk(f, transform_point(g, x))

``convention="pushforward"`` swaps ``transform_point`` for its inverse
``x -> A^{-T} (x + val(lambda))``, for which::

    stalk(transform_section(g, f), transform_point(g, x)) == stalk(f, x)

A truncated section converges on a polyhedron iff no support exponent
increases along a recession ray.  Infinite sections are represented by
callables producing terms up to a degree bound; see :class:`SeriesSection`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .qalg import TwistForm, TwistedElement, rebase
from .scalars import LogNorm, Scalar
from .spectra import monomial_eval

PULLBACK = "pullback"
PUSHFORWARD = "pushforward"


@dataclass(frozen=True)
class Polytope:
    """Convex hull of ``vertices`` plus the cone on integer ``rays``."""
    vertices: tuple
    rays: tuple = ()

    def __init__(self, vertices: Sequence[Sequence], rays: Sequence[Sequence[int]] = ()):
        vs = tuple(tuple(Fraction(c) for c in v) for v in vertices)
        if not vs:
            raise ValueError("polytope needs at least one vertex")
        n = len(vs[0])
        rs = tuple(tuple(int(c) for c in r) for r in rays)
        if any(len(v) != n for v in vs) or any(len(r) != n for r in rs):
            raise ValueError("inconsistent dimensions")
        if any(not any(r) for r in rs):
            raise ValueError("zero ray")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "rays", rs)

    @property
    def dim(self):
        return len(self.vertices[0])

    def to_json(self):
        return {"vertices": [[str(c) for c in v] for v in self.vertices],
                "rays": [list(r) for r in self.rays]}

    @classmethod
    def from_json(cls, data):
        return cls(data["vertices"], data.get("rays", ()))


def converges_on(f: TwistedElement, U: Polytope) -> bool:
    if f.dim != U.dim:
        raise ValueError("dimension mismatch")
    return all(sum(i * v for i, v in zip(I, r)) <= 0
               for r in U.rays for I in f.terms)


def stalk_lognorm(f: TwistedElement, x: Sequence) -> LogNorm:
    return monomial_eval(f, x)


# ----------------------------------------------------------------------
# integer matrix helpers


def _matvec(A, v):
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def _transpose(A):
    return tuple(zip(*A))


def _matmul(A, B):
    Bt = _transpose(B)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def _det(A) -> Fraction:
    n = len(A)
    M = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            k = M[r][c] / M[c][c]
            for j in range(c, n):
                M[r][j] -= k * M[c][j]
    return det


def _inverse(A):
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c])
        M[c], M[piv] = M[piv], M[c]
        p = M[c][c]
        M[c] = [x / p for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                k = M[r][c]
                M[r] = [x - k * y for x, y in zip(M[r], M[c])]
    inv = [row[n:] for row in M]
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


@dataclass(frozen=True)
class TransitionData:
    """An element ``(A, lambda)`` of SL(n, Z) x| (K^x)^n."""
    A: tuple
    lam: tuple

    def __init__(self, A: Sequence[Sequence[int]], lam: Sequence[Scalar]):
        A = tuple(tuple(int(x) for x in row) for row in A)
        lam = tuple(lam)
        if len(A) != len(lam):
            raise ValueError("dimension mismatch")
        if _det(A) != 1:
            raise ValueError("A must have determinant 1")
        if any(l.is_zero() for l in lam):
            raise ValueError("lambda entries must be nonzero")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "lam", lam)

    @property
    def dim(self):
        return len(self.A)

    @classmethod
    def identity(cls, n: int, precision: int | None = None):
        return cls([[int(i == j) for j in range(n)] for i in range(n)],
                   [Scalar.const(1, precision)] * n)

    def valuations(self) -> tuple:
        return tuple(Fraction(l.val()) for l in self.lam)

    def compose(self, other: "TransitionData") -> "TransitionData":
        """``g.compose(h)`` acts on sections as ``g`` after ``h``."""
        A2 = other.A
        n = self.dim
        lam = []
        for j in range(n):
            c = other.lam[j]
            for i in range(n):
                if A2[i][j]:
                    c = c * self.lam[i] ** A2[i][j]
            lam.append(c)
        return TransitionData(_matmul(self.A, A2), lam)

    def inverse(self) -> "TransitionData":
        Ai = _inverse(self.A)
        n = self.dim
        lam = []
        for i in range(n):
            c = Scalar.const(1, self.lam[0].precision)
            for j in range(n):
                if Ai[j][i]:
                    c = c * self.lam[j] ** (-Ai[j][i])
            lam.append(c)
        return TransitionData(Ai, lam)

    def to_json(self):
        return {"A": [list(r) for r in self.A], "lambda": [l.to_json() for l in self.lam]}

    @classmethod
    def from_json(cls, data):
        return cls(data["A"], [Scalar.from_json(x) for x in data["lambda"]])


def transformed_twist(g: TransitionData, twist: TwistForm) -> TwistForm:
    """``B'`` with ``B'(A I, A J) = B(I, J)``."""
    Ai = _inverse(g.A)
    M = _matmul(_matmul(_transpose(Ai), twist.matrix), Ai)
    return TwistForm(M)


def transform_section(g: TransitionData, f: TwistedElement,
                      rebase_back: bool = True) -> TwistedElement:
    """``z**I -> prod(lambda_i**I_i) z**(A I)``, as an algebra map.

    The image lives over the form ``B'(A I, A J) = B(I, J)``.  When ``B'`` has
    the commutation form of ``B`` (always for n = 2 and det A = 1) and
    ``rebase_back`` is set, the result is rebased back to ``f``'s twist; the
    rebase only multiplies coefficients by powers of ``q``, so norms are
    untouched.  For skew twists ``B' == B`` and nothing is rebased.  For other
    twists the rebase differs from the identity by a character
    ``m(I) -> q**l(I) m(I)``, so exact composition laws hold only with
    ``rebase_back=False``.
    """
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    powers: dict = {}

    def lam_power(i, k):
        key = (i, k)
        if key not in powers:
            powers[key] = g.lam[i] ** k
        return powers[key]

    out = {}
    for I, c in f.terms.items():
        coef = c
        for i, k in enumerate(I):
            if k:
                coef = coef * lam_power(i, k)
        out[_matvec(g.A, I)] = coef
    image = TwistedElement(transformed_twist(g, f.twist), f.q, out, f.domain)
    if not rebase_back or image.twist == f.twist:
        return image
    if image.twist.commutation() == f.twist.commutation():
        return rebase(image, f.twist)
    return image


def transform_point(g: TransitionData, x: Sequence, convention: str = PULLBACK) -> tuple:
    x = tuple(Fraction(v) for v in x)
    v = g.valuations()
    if convention == PULLBACK:
        Ax = _matvec(_transpose(g.A), x)
        return tuple(a - b for a, b in zip(Ax, v))
    if convention == PUSHFORWARD:
        Ait = _transpose(_inverse(g.A))
        return _matvec(Ait, tuple(a + b for a, b in zip(x, v)))
    raise ValueError(f"unknown convention {convention!r}")


def transform_polytope(g: TransitionData, U: Polytope) -> Polytope:
    """Region on which ``transform_section(g, f)`` converges iff ``f`` does on ``U``."""
    verts = [transform_point(g, v, PUSHFORWARD) for v in U.vertices]
    Ait = _transpose(_inverse(g.A))
    rays = [_matvec(Ait, r) for r in U.rays]
    return Polytope(verts, rays)


def equivariance_holds(g: TransitionData, f: TwistedElement, x: Sequence,
                       convention: str = PULLBACK) -> bool:
    image = transform_section(g, f)
    if convention == PULLBACK:
        return stalk_lognorm(image, x) == stalk_lognorm(f, transform_point(g, x, PULLBACK))
    return stalk_lognorm(image, transform_point(g, x, PUSHFORWARD)) == stalk_lognorm(f, x)


@dataclass
class SheafSection:
    element: TwistedElement
    domain: Polytope

    def __post_init__(self):
        if not converges_on(self.element, self.domain):
            raise ValueError("section does not converge on its declared domain")


class SeriesSection:
    """An infinite section given by a generator of its degree-``D`` truncations.

    ``terms(D)`` must return a :class:`TwistedElement` holding every term of
    total degree ``<= D``; truncations are checked against the domain lazily.
    """

    def __init__(self, terms: Callable[[int], TwistedElement], domain: Polytope):
        self._terms = terms
        self.domain = domain

    def truncation(self, D: int) -> SheafSection:
        return SheafSection(self._terms(D), self.domain)
