"""Polynomial functions on the unit sphere S^3 in C^2, in canonical form.

A function is stored as a finite sum of monomials z^a w^b zbar^c wbar^d with
exact Gaussian-rational coefficients. The relation z zbar + w wbar = 1 makes
the representation non-unique; the canonical form eliminates every mixed
z zbar power by rewriting (z zbar)^k = (1 - w wbar)^k, so each stored key
satisfies a*c == 0. Equality of functions on the sphere is then equality of
canonical coefficient dictionaries.

Derivations:
    Z1   = wbar d/dz - zbar d/dw          (CR frame field)
    Z1b  = w d/dzbar - z d/dwbar          (its conjugate)
    T    = i(z d/dz + w d/dw) - i(zbar d/dzbar + wbar d/dwbar)   (Reeb)

All three are tangent to the sphere (they annihilate |z|^2 + |w|^2 - 1), so
they descend to the quotient algebra and preserve canonical form after
re-reduction.
"""

from math import comb

import numpy as np

from .scalars import QQi, QQI_ZERO, Pi2Multiple, rational


def _canonicalize(raw):
    """Reduce a {(a,b,c,d): QQi} dict so that every key has a*c == 0."""
    out = {}
    for (a, b, c, d), coef in raw.items():
        if coef.is_zero():
            continue
        k = a if a < c else c
        if k == 0:
            prev = out.get((a, b, c, d))
            s = coef if prev is None else prev + coef
            if s.is_zero():
                out.pop((a, b, c, d), None)
            else:
                out[(a, b, c, d)] = s
            continue
        # (z zbar)^k = (1 - w wbar)^k, expanded once; result keys are final.
        a2, c2 = a - k, c - k
        for j in range(k + 1):
            sign = comb(k, j) if j % 2 == 0 else -comb(k, j)
            key = (a2, b + j, c2, d + j)
            term = coef * sign
            prev = out.get(key)
            s = term if prev is None else prev + term
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
    return out


class PolyFn:
    """Canonical-form polynomial function on S^3 with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None, reduced=False):
        if terms is None:
            terms = {}
        self.terms = terms if reduced else _canonicalize(terms)

    # -- constructors -------------------------------------------------

    @staticmethod
    def monomial(a, b, c, d, coef=1):
        return PolyFn({(a, b, c, d): QQi.of(coef)})

    @staticmethod
    def const(coef):
        coef = QQi.of(coef)
        if coef.is_zero():
            return PolyFn({}, reduced=True)
        return PolyFn({(0, 0, 0, 0): coef}, reduced=True)

    @staticmethod
    def zero():
        return PolyFn({}, reduced=True)

    # -- ring structure -----------------------------------------------

    def __add__(self, other):
        if not isinstance(other, PolyFn):
            return NotImplemented
        out = dict(self.terms)
        for key, coef in other.terms.items():
            prev = out.get(key)
            s = coef if prev is None else prev + coef
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return PolyFn(out, reduced=True)

    def __sub__(self, other):
        if not isinstance(other, PolyFn):
            return NotImplemented
        out = dict(self.terms)
        for key, coef in other.terms.items():
            prev = out.get(key)
            s = -coef if prev is None else prev - coef
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return PolyFn(out, reduced=True)

    def __neg__(self):
        return PolyFn({k: -v for k, v in self.terms.items()}, reduced=True)

    def __mul__(self, other):
        if isinstance(other, PolyFn):
            raw = {}
            for (a1, b1, c1, d1), u in self.terms.items():
                for (a2, b2, c2, d2), v in other.terms.items():
                    key = (a1 + a2, b1 + b2, c1 + c2, d1 + d2)
                    p = u * v
                    prev = raw.get(key)
                    s = p if prev is None else prev + p
                    raw[key] = s
            return PolyFn(raw)
        return self.smul(other)

    __rmul__ = __mul__

    def smul(self, scalar):
        scalar = QQi.of(scalar)
        if scalar.is_zero():
            return PolyFn.zero()
        return PolyFn({k: v * scalar for k, v in self.terms.items()}, reduced=True)

    def __eq__(self, other):
        if not isinstance(other, PolyFn):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Total degree of the canonical representative (-1 for 0)."""
        if not self.terms:
            return -1
        return max(a + b + c + d for (a, b, c, d) in self.terms)

    # -- derivations ----------------------------------------------------

    def z1(self):
        """Z1 = wbar d/dz - zbar d/dw."""
        raw = {}
        for (a, b, c, d), coef in self.terms.items():
            if a:
                key = (a - 1, b, c, d + 1)
                t = coef * a
                prev = raw.get(key)
                raw[key] = t if prev is None else prev + t
            if b:
                key = (a, b - 1, c + 1, d)
                t = coef * (-b)
                prev = raw.get(key)
                raw[key] = t if prev is None else prev + t
        return PolyFn(raw)

    def z1b(self):
        """Z1b = w d/dzbar - z d/dwbar (conjugate of z1)."""
        raw = {}
        for (a, b, c, d), coef in self.terms.items():
            if c:
                key = (a, b + 1, c - 1, d)
                t = coef * c
                prev = raw.get(key)
                raw[key] = t if prev is None else prev + t
            if d:
                key = (a + 1, b, c, d - 1)
                t = coef * (-d)
                prev = raw.get(key)
                raw[key] = t if prev is None else prev + t
        return PolyFn(raw)

    def t_op(self):
        """Reeb derivative T (diagonal on monomials: i(a+b-c-d))."""
        out = {}
        for (a, b, c, d), coef in self.terms.items():
            k = a + b - c - d
            if k:
                out[(a, b, c, d)] = coef * QQi(0, k)
        return PolyFn(out, reduced=True)

    def conj(self):
        return PolyFn(
            {(c, d, a, b): v.conj() for (a, b, c, d), v in self.terms.items()},
            reduced=True,
        )

    # -- integration ------------------------------------------------------

    def integrate(self):
        """Integral against theta ^ dtheta (total mass 4 pi^2).

        In canonical form only monomials (w wbar)^b survive, each contributing
        4 pi^2 / (b + 1).
        """
        acc = QQI_ZERO
        for (a, b, c, d), coef in self.terms.items():
            if a == 0 and c == 0 and b == d:
                acc = acc + coef * rational(4, b + 1)
        return Pi2Multiple(acc)

    def inner(self, other):
        """Hermitian L^2 pairing <self, other> = integral self * conj(other)."""
        return (self * other.conj()).integrate()

    def norm_sq(self):
        return self.inner(self)

    # -- structure helpers ------------------------------------------------

    def weight_components(self):
        """Split by torus weight (a - c, b - d); returns {(m1, m2): PolyFn}."""
        buckets = {}
        for key, coef in self.terms.items():
            a, b, c, d = key
            wkey = (a - c, b - d)
            buckets.setdefault(wkey, {})[key] = coef
        return {w: PolyFn(t, reduced=True) for w, t in buckets.items()}

    def real_part(self):
        return (self + self.conj()).smul(rational(1, 2))

    def imag_part(self):
        return (self - self.conj()).smul(QQi(0, rational(-1, 2)))

    # -- numeric evaluation -----------------------------------------------

    def evaluate(self, cos_eta, sin_eta, exp_i_xi1, exp_i_xi2):
        """Evaluate on Hopf-coordinate arrays (broadcasting numpy inputs).

        z = cos(eta) e^{i xi1}, w = sin(eta) e^{i xi2}; a monomial takes the
        value cos^{a+c} sin^{b+d} e^{i(a-c)xi1} e^{i(b-d)xi2}.
        """
        shape = np.broadcast(cos_eta, sin_eta, exp_i_xi1, exp_i_xi2).shape
        acc = np.zeros(shape, dtype=complex)
        cpow = {}
        spow = {}
        e1pow = {}
        e2pow = {}

        def power(cache, base, k):
            arr = cache.get(k)
            if arr is None:
                if k >= 0:
                    arr = base**k
                else:
                    arr = np.conj(base) ** (-k)
                cache[k] = arr
            return arr

        for (a, b, c, d), coef in self.terms.items():
            term = (
                power(cpow, cos_eta, a + c)
                * power(spow, sin_eta, b + d)
                * power(e1pow, exp_i_xi1, a - c)
                * power(e2pow, exp_i_xi2, b - d)
            )
            acc = acc + coef.to_complex() * term
        return acc

    def __repr__(self):
        if not self.terms:
            return "PolyFn(0)"
        bits = []
        for key in sorted(self.terms):
            a, b, c, d = key
            mono = "".join(
                s
                for s, k in (
                    ("z^%d" % a, a),
                    ("w^%d" % b, b),
                    ("zb^%d" % c, c),
                    ("wb^%d" % d, d),
                )
                if k
            )
            bits.append("%r*%s" % (self.terms[key], mono or "1"))
        return "PolyFn(%s)" % " + ".join(bits)


# Generators.
Z = PolyFn.monomial(1, 0, 0, 0)
W = PolyFn.monomial(0, 1, 0, 0)
ZB = PolyFn.monomial(0, 0, 1, 0)
WB = PolyFn.monomial(0, 0, 0, 1)
ONE = PolyFn.const(1)


def nabla0(f, weight):
    """Flat-connection Reeb covariant derivative on a weighted tensor component.

    weight = (#lower-1 - #upper-1) + (#upper-1bar - #lower-1bar); the standard
    connection form contributes 2i * weight next to T.
    """
    return f.t_op() + f.smul(QQi(0, 2 * weight))


def sublaplacian(f):
    """Delta_b = -(Z1 Z1b + Z1b Z1); positive with blockwise action 2pq+p+q."""
    return -(f.z1b().z1() + f.z1().z1b())
