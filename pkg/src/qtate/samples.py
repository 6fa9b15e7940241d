"""Seeded random inputs for property suites (CLI checks and tests)."""
from __future__ import annotations

import math
import random
from fractions import Fraction

from .qalg import POLYDISC, TORUS, FreeElement, TwistForm, TwistedElement
from .scalars import Scalar
from .sheaf import TransitionData

SL2_SAMPLES = ([[1, 1], [0, 1]], [[1, 0], [1, 1]], [[2, 1], [1, 1]], [[0, -1], [1, 0]],
               [[1, -2], [1, -1]], [[3, 2], [1, 1]], [[1, 0], [0, 1]])


def scalar(rng: random.Random, lo: int = -2, hi: int = 3, terms: int = 2,
           precision: int | None = None) -> Scalar:
    """Nonzero scalar with a few small rational coefficients."""
    while True:
        out = {}
        for _ in range(rng.randint(1, terms)):
            out[rng.randint(lo, hi)] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]),
                                                rng.choice([1, 1, 2, 3]))
        s = Scalar(out, precision)
        if s:
            return s


def small_scalar(rng: random.Random, rho, strict: bool = False) -> Scalar:
    """Scalar ``a`` with ``lognorm(a) <= rho``, or ``< rho`` when ``strict``."""
    v = math.floor(-rho) + 1 if strict else math.ceil(-rho)
    return Scalar({v: rng.choice([1, -1, 2]), v + 1: rng.choice([0, 1])})


def element(rng: random.Random, twist: TwistForm, q: Scalar, degree: int = 5,
            terms: int = 4, domain: str = TORUS, lo: int = -1, hi: int = 3) -> TwistedElement:
    d = twist.dim
    low = 0 if domain == POLYDISC else -degree
    out = {}
    for _ in range(rng.randint(1, terms)):
        lam = tuple(rng.randint(low, degree) for _ in range(d))
        out[lam] = scalar(rng, lo, hi, precision=q.precision)
    f = TwistedElement(twist, q, out, domain)
    return f if not f.is_zero() else element(rng, twist, q, degree, terms, domain, lo, hi)


def skew_twist(rng: random.Random, d: int) -> TwistForm:
    phi = [[0] * d for _ in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            phi[i][j] = rng.randint(-2, 2)
            phi[j][i] = -phi[i][j]
    return TwistForm.skew(phi)


def free_element(rng: random.Random, n: int, length: int = 4, terms: int = 4) -> FreeElement:
    out = {}
    for _ in range(rng.randint(1, terms)):
        w = tuple(rng.randint(1, n) for _ in range(rng.randint(0, length)))
        out[w] = scalar(rng)
    f = FreeElement(n, out)
    return f if f.terms else free_element(rng, n, length, terms)


def log_radii(rng: random.Random, d: int, lo: int = -3, hi: int = 3) -> tuple:
    return tuple(Fraction(rng.randint(lo * 4, hi * 4), rng.choice([1, 2, 4])) for _ in range(d))


def transition(rng: random.Random, n: int = 2, precision: int | None = None) -> TransitionData:
    A = rng.choice(SL2_SAMPLES)
    lam = [Scalar({rng.randint(-3, 3): rng.choice([1, 2, -1, Fraction(1, 2)])}, precision)
           for _ in range(n)]
    return TransitionData(A, lam)
