"""Twisted monomial algebras over :class:`~qtate.scalars.Scalar`.

A :class:`TwistForm` is an integer bilinear form ``B`` on Z^d.  The algebra it
defines has basis ``m(lam)`` and product

    m(lam) * m(mu) = q**B(lam, mu) * m(lam + mu)

which is associative for every bilinear ``B``.  Two forms with the same
commutation matrix ``B - B.T`` give isomorphic algebras (see :func:`rebase`).

Two instances cover everything in the package:

* ``TwistForm.skew(phi)`` -- the lattice picture ``e(l) e(m) = q**phi(l, m) e(l+m)``;
* ``TwistForm.ordered(S)`` -- ``m(lam)`` is the ordered product
  ``T_1**lam_1 ... T_d**lam_d`` of generators with ``T_i T_j = q**S[i][j] T_j T_i``.

With ``phi(e_i, e_j) = 1`` for ``i < j`` the skew picture has commutation
exponent 2, the ordered picture built from ``S[i][j] = 1`` has exponent 1.
Both are supported; nothing converts between them silently.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .scalars import LogNorm, Scalar, lognorm_max, one

POLYDISC = "polydisc"
TORUS = "torus"


class TwistMismatch(ValueError):
    pass


class TwistForm:
    __slots__ = ("matrix", "dim")

    def __init__(self, matrix: Sequence[Sequence[int]]):
        self.matrix = tuple(tuple(int(x) for x in row) for row in matrix)
        self.dim = len(self.matrix)
        if any(len(row) != self.dim for row in self.matrix):
            raise ValueError("twist matrix must be square")

    @classmethod
    def zero(cls, d: int) -> "TwistForm":
        return cls([[0] * d for _ in range(d)])

    @classmethod
    def skew(cls, phi: Sequence[Sequence[int]]) -> "TwistForm":
        tf = cls(phi)
        if any(tf.matrix[i][j] != -tf.matrix[j][i]
               for i in range(tf.dim) for j in range(tf.dim)):
            raise ValueError("form is not skew-symmetric")
        return tf

    @classmethod
    def simply_laced(cls, d: int) -> "TwistForm":
        """phi(e_i, e_j) = 1 for i < j."""
        return cls.skew([[(1 if i < j else -1 if i > j else 0) for j in range(d)]
                         for i in range(d)])

    @classmethod
    def ordered(cls, commutation: Sequence[Sequence[int]]) -> "TwistForm":
        """Ordered-monomial basis for ``T_i T_j = q**S[i][j] T_j T_i``.

        Moving ``T_j`` left past ``T_i`` (``i > j``) costs ``q**S[i][j]``, so
        the cocycle is ``B[i][j] = S[i][j]`` below the diagonal and 0 elsewhere.
        """
        S = [[int(x) for x in row] for row in commutation]
        d = len(S)
        return cls([[S[i][j] if i > j else 0 for j in range(d)] for i in range(d)])

    @classmethod
    def q_commuting(cls, d: int) -> "TwistForm":
        """``T_i T_j = q T_j T_i`` for ``i < j`` in the ordered basis."""
        return cls.ordered([[(1 if i < j else -1 if i > j else 0) for j in range(d)]
                            for i in range(d)])

    def __call__(self, lam: Sequence[int], mu: Sequence[int]) -> int:
        return sum(self.matrix[i][j] * lam[i] * mu[j]
                   for i in range(self.dim) if lam[i]
                   for j in range(self.dim) if mu[j])

    def commutation(self) -> tuple:
        """The skew form ``B - B.T``: ``m(l) m(u) = q**C(l, u) m(u) m(l)``."""
        M = self.matrix
        return tuple(tuple(M[i][j] - M[j][i] for j in range(self.dim))
                     for i in range(self.dim))

    def commutator_exponent(self, lam, mu) -> int:
        return self(lam, mu) - self(mu, lam)

    def __eq__(self, other):
        return isinstance(other, TwistForm) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"TwistForm({[list(r) for r in self.matrix]})"


class QPowers:
    """Cache of integer powers of q."""

    def __init__(self, q: Scalar):
        self.q = q
        self._cache = {0: one(q.precision)}

    def __call__(self, k: int) -> Scalar:
        r = self._cache.get(k)
        if r is None:
            r = self.q ** k
            self._cache[k] = r
        return r


_QPOW: dict = {}


def qpow(q: Scalar, k: int) -> Scalar:
    key = (q, q.precision)
    cache = _QPOW.get(key)
    if cache is None:
        if len(_QPOW) > 64:
            _QPOW.clear()
        cache = _QPOW[key] = QPowers(q)
    return cache(k)


def _degree(lam) -> int:
    return sum(abs(x) for x in lam)


class TwistedElement:
    """Finitely supported sum of ``coeff * m(exp)`` in a twisted algebra."""

    __slots__ = ("twist", "q", "domain", "truncation", "_terms")

    def __init__(self, twist: TwistForm, q: Scalar,
                 terms: Mapping[Sequence[int], Scalar] | None = None,
                 domain: str = TORUS, truncation: int | None = None):
        if q.lognorm() != 0:
            raise ValueError("|q| must be 1")
        if domain not in (POLYDISC, TORUS):
            raise ValueError(f"unknown domain {domain!r}")
        self.twist = twist
        self.q = q
        self.domain = domain
        self.truncation = truncation
        clean = {}
        for lam, c in (terms or {}).items():
            lam = tuple(int(x) for x in lam)
            if len(lam) != twist.dim:
                raise ValueError(f"exponent {lam} has wrong dimension")
            if domain == POLYDISC and min(lam, default=0) < 0:
                raise ValueError("polydisc elements have no negative exponents")
            if truncation is not None and _degree(lam) > truncation:
                continue
            if not isinstance(c, Scalar):
                c = q.coerce(c)
            if c:
                clean[lam] = clean[lam] + c if lam in clean else c
        self._terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def _raw(cls, like: "TwistedElement", terms: dict, truncation="same",
             twist: TwistForm | None = None) -> "TwistedElement":
        obj = object.__new__(cls)
        obj.twist = twist or like.twist
        obj.q = like.q
        obj.domain = like.domain
        obj.truncation = like.truncation if truncation == "same" else truncation
        obj._terms = terms
        return obj

    # constructors -------------------------------------------------------
    @classmethod
    def monomial(cls, twist: TwistForm, q: Scalar, lam: Sequence[int],
                 coeff: Scalar | int | Fraction = 1, domain: str = TORUS,
                 truncation: int | None = None) -> "TwistedElement":
        return cls(twist, q, {tuple(lam): coeff}, domain, truncation)

    @classmethod
    def constant(cls, twist, q, c=1, domain=TORUS, truncation=None):
        return cls.monomial(twist, q, (0,) * twist.dim, c, domain, truncation)

    def like(self, terms: Mapping) -> "TwistedElement":
        return TwistedElement(self.twist, self.q, terms, self.domain, self.truncation)

    def mono(self, lam, coeff=1) -> "TwistedElement":
        return self.like({tuple(lam): coeff})

    # inspection ---------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.twist.dim

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def support(self):
        return sorted(self._terms)

    def coeff(self, lam) -> Scalar:
        return self._terms.get(tuple(lam), self.q.coerce(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def _check(self, other: "TwistedElement"):
        if self.twist != other.twist:
            raise TwistMismatch("twist forms differ")
        if self.q != other.q:
            raise TwistMismatch("q differs")

    def _combine_domain(self, other):
        return POLYDISC if self.domain == other.domain == POLYDISC else TORUS

    @staticmethod
    def _min_trunc(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "TwistedElement":
        if isinstance(other, TwistedElement):
            return other
        if isinstance(other, (int, Fraction, Scalar)):
            return self.mono((0,) * self.dim, other)
        raise TypeError(f"cannot coerce {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for lam, c in other._terms.items():
            s = out[lam] + c if lam in out else c
            if s:
                out[lam] = s
            else:
                out.pop(lam, None)
        trunc = self._min_trunc(self.truncation, other.truncation)
        if trunc is not None:
            out = {k: v for k, v in out.items() if _degree(k) <= trunc}
        res = TwistedElement._raw(self, out, trunc)
        res.domain = self._combine_domain(other)
        return res

    __radd__ = __add__

    def __neg__(self):
        return TwistedElement._raw(self, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "TwistedElement":
        c = self.q.coerce(c)
        return TwistedElement._raw(
            self, {k: v * c for k, v in self._terms.items() if v * c})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        if not isinstance(other, TwistedElement):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("use invert_monomial or a series inverse")
        result = self.mono((0,) * self.dim)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = self._coerce(other)
        if not isinstance(other, TwistedElement):
            return NotImplemented
        if self.twist != other.twist:
            return False
        keys = set(self._terms) | set(other._terms)
        return all(self.coeff(k) == other.coeff(k) for k in keys)

    __hash__ = None

    def map_terms(self, fn: Callable) -> "TwistedElement":
        """Rebuild from ``fn(exp, coeff) -> (exp, coeff)`` applied per term."""
        out: dict = {}
        for lam, c in self._terms.items():
            lam2, c2 = fn(lam, c)
            lam2 = tuple(lam2)
            out[lam2] = out[lam2] + c2 if lam2 in out else c2
        return TwistedElement._raw(self, {k: v for k, v in out.items() if v})

    def filter(self, keep: Callable) -> "TwistedElement":
        return TwistedElement._raw(
            self, {k: v for k, v in self._terms.items() if keep(k)})

    def with_twist(self, twist: TwistForm) -> "TwistedElement":
        """Same coefficients read in another basis (no conversion)."""
        return TwistedElement._raw(self, dict(self._terms), twist=twist)

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"({c})*m{lam}" for lam, c in self.items())

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "twist": [list(r) for r in self.twist.matrix],
            "q": self.q.to_json(),
            "domain": self.domain,
            "terms": [{"exp": list(lam), "coeff": c.to_json()}
                      for lam, c in self.items()],
            "truncation": self.truncation,
        }

    @classmethod
    def from_json(cls, data) -> "TwistedElement":
        twist = TwistForm(data["twist"])
        q = Scalar.from_json(data["q"])
        terms = {tuple(t["exp"]): Scalar.from_json(t["coeff"]) for t in data["terms"]}
        return cls(twist, q, terms, data.get("domain", TORUS), data.get("truncation"))


def mul(f: TwistedElement, g: TwistedElement) -> TwistedElement:
    """Bilinear extension of ``m(l) m(u) = q**B(l, u) m(l + u)``."""
    f._check(g)
    B = f.twist
    q = f.q
    trunc = TwistedElement._min_trunc(f.truncation, g.truncation)
    out: dict = {}
    for lam, a in f._terms.items():
        for mu, b in g._terms.items():
            nu = tuple(x + y for x, y in zip(lam, mu))
            if trunc is not None and _degree(nu) > trunc:
                continue
            c = a * b
            k = B(lam, mu)
            if k:
                c = c * qpow(q, k)
            out[nu] = out[nu] + c if nu in out else c
    res = TwistedElement._raw(f, {k: v for k, v in out.items() if v}, trunc)
    res.domain = f._combine_domain(g)
    return res


def gauss_norm(f: TwistedElement, rho: Sequence) -> LogNorm:
    """``max_lam lognorm(a_lam) + lam . rho``; ``rho`` are log-radii."""
    if len(rho) != f.dim:
        raise ValueError("dimension mismatch")
    rho = [Fraction(r) for r in rho]
    return lognorm_max(c.lognorm() + sum(l * r for l, r in zip(lam, rho))
                       for lam, c in f._terms.items())


def rebase_exponent(lam: Sequence[int], C) -> int:
    """Integer quadratic ``s`` with ``s(l+u) - s(l) - s(u) = l.C.u`` and s(e_i)=0."""
    d = len(lam)
    s = 0
    for i in range(d):
        if lam[i]:
            s += C[i][i] * lam[i] * (lam[i] - 1) // 2
            for j in range(i + 1, d):
                s += C[i][j] * lam[i] * lam[j]
    return s


def rebase(f: TwistedElement, target: TwistForm) -> TwistedElement:
    """Algebra isomorphism to the basis of ``target``.

    Requires equal commutation forms.  ``m_B(l) -> q**s(l) m_B'(l)`` with
    ``s`` the quadratic form polarizing ``C = B' - B`` (symmetric because the
    skew parts agree); generators are fixed.  No halving is ever needed.
    """
    if f.twist.commutation() != target.commutation():
        raise TwistMismatch("commutation forms differ")
    C = [[target.matrix[i][j] - f.twist.matrix[i][j] for j in range(f.dim)]
         for i in range(f.dim)]
    q = f.q
    out = {}
    for lam, c in f._terms.items():
        s = rebase_exponent(lam, C)
        out[lam] = c * qpow(q, s) if s else c
    return TwistedElement._raw(f, out, twist=target)


def ordered_coefficient(twist: TwistForm, q: Scalar, lam: Sequence[int]) -> Scalar:
    """``c`` with ``m(e_1)**l_1 ... m(e_d)**l_d = c * m(lam)``."""
    d = twist.dim
    k = 0
    acc = [0] * d
    for i in range(d):
        li = lam[i]
        if not li:
            continue
        ei = [0] * d
        ei[i] = 1
        # m(e)^l = q^{B(e,e) l(l-1)/2} m(l e), valid for negative l too
        k += twist.matrix[i][i] * li * (li - 1) // 2
        step = [0] * d
        step[i] = li
        k += twist(acc, step)
        acc[i] += li
    return qpow(q, k)


def substitute(f: TwistedElement, images: Sequence[TwistedElement],
               inverse_images: Sequence[TwistedElement] | None = None,
               truncate: Callable | None = None) -> TwistedElement:
    """Apply the algebra map sending generator ``m(e_i)`` to ``images[i]``.

    ``inverse_images[i]`` must be supplied whenever a negative power of
    generator ``i`` occurs.  ``truncate`` (optional) filters every partial
    product.
    """
    d = f.dim
    target0 = images[0]
    cache: dict = {}

    def power(i, k):
        key = (i, k)
        if key in cache:
            return cache[key]
        if k == 0:
            r = target0.mono((0,) * target0.dim)
        elif k > 0:
            r = power(i, k - 1) * images[i]
        else:
            if inverse_images is None or inverse_images[i] is None:
                raise ValueError(f"negative power of generator {i} needs an inverse")
            r = power(i, k + 1) * inverse_images[i]
        if truncate is not None:
            r = truncate(r)
        cache[key] = r
        return r

    result = target0.like({})
    for lam, c in f._terms.items():
        term = target0.mono((0,) * target0.dim, c / ordered_coefficient(f.twist, f.q, lam))
        for i in range(d):
            if lam[i]:
                term = term * power(i, lam[i])
                if truncate is not None:
                    term = truncate(term)
        result = result + term
    return result


def monomial_inverse(f: TwistedElement) -> TwistedElement:
    """Inverse of ``c * m(lam)``: ``c**-1 q**B(lam, lam) m(-lam)``."""
    if len(f) != 1:
        raise ValueError("not a monomial")
    (lam, c), = f._terms.items()
    k = f.twist(lam, lam)
    return f.mono(tuple(-x for x in lam), c.inv() * qpow(f.q, k))


# ----------------------------------------------------------------------
# free algebra


class FreeElement:
    """Noncommutative polynomial: words over ``1..n`` to Scalars."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[Sequence[int], Scalar] | None = None):
        self.n = n
        clean = {}
        for w, c in (terms or {}).items():
            w = tuple(int(x) for x in w)
            if any(not 1 <= x <= n for x in w):
                raise ValueError(f"letter out of range in {w}")
            if not isinstance(c, Scalar):
                c = Scalar.const(c)
            if c:
                clean[w] = clean[w] + c if w in clean else c
        self._terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def word(cls, n: int, *letters: int, coeff=1) -> "FreeElement":
        return cls(n, {tuple(letters): coeff})

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def _check(self, other):
        if self.n != other.n:
            raise ValueError("alphabet mismatch")

    def __add__(self, other):
        self._check(other)
        out = dict(self._terms)
        for w, c in other._terms.items():
            s = out[w] + c if w in out else c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return FreeElement(self.n, out)

    def __neg__(self):
        return FreeElement(self.n, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return free_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, FreeElement):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    __hash__ = None

    def __repr__(self):
        return " + ".join(f"({c})*w{w}" for w, c in self.items()) or "0"

    def to_json(self):
        return {"n": self.n, "terms": [{"word": list(w), "coeff": c.to_json()}
                                       for w, c in self.items()]}

    @classmethod
    def from_json(cls, data):
        return cls(data["n"], {tuple(t["word"]): Scalar.from_json(t["coeff"])
                               for t in data["terms"]})


def free_mul(f: FreeElement, g: FreeElement) -> FreeElement:
    f._check(g)
    out: dict = {}
    for u, a in f._terms.items():
        for v, b in g._terms.items():
            w = u + v
            c = a * b
            out[w] = out[w] + c if w in out else c
    return FreeElement(f.n, out)


def free_gauss_norm(f: FreeElement, r: Sequence) -> LogNorm:
    """Max over words of ``lognorm(coeff) + sum of log r over letters``."""
    if len(r) != f.n:
        raise ValueError("alphabet mismatch")
    r = [Fraction(x) for x in r]
    return lognorm_max(c.lognorm() + sum(r[x - 1] for x in w)
                       for w, c in f._terms.items())


def basis_vectors(d: int) -> Iterable[tuple]:
    for i in range(d):
        yield tuple(1 if j == i else 0 for j in range(d))


def all_exponents(d: int, lo: int, hi: int) -> Iterable[tuple]:
    return itertools.product(range(lo, hi + 1), repeat=d)
