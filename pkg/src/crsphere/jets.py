"""Formal jets in a real deformation parameter t, coefficients exact.

A JetSeries of order K holds polynomial functions f_0 .. f_K with
f = sum f_k t^k modulo t^{K+1}. All ring operations are exact (QQi
coefficients); there is no spatial truncation, so identities that hold
for the underlying geometry hold coefficient-by-coefficient here.
"""

from fractions import Fraction

from .polyfn import ONE, PolyFn
from .scalars import QQi


class JetSeries:
    __slots__ = ("order", "coeffs")

    def __init__(self, order, coeffs=()):
        if order < 0:
            raise ValueError("jet order must be >= 0")
        self.order = int(order)
        cs = list(coeffs)[: order + 1]
        cs += [PolyFn.zero()] * (order + 1 - len(cs))
        self.coeffs = tuple(cs)

    @staticmethod
    def of_polyfn(u, order, power=0):
        if power > order:
            return JetSeries(order)
        cs = [PolyFn.zero()] * (order + 1)
        cs[power] = u
        return JetSeries(order, cs)

    @staticmethod
    def one(order):
        return JetSeries.of_polyfn(ONE, order)

    @staticmethod
    def zero(order):
        return JetSeries(order)

    def coefficient(self, k):
        return self.coeffs[k] if k <= self.order else PolyFn.zero()

    def _match(self, other):
        if not isinstance(other, JetSeries):
            raise TypeError("expected a JetSeries")
        if self.order != other.order:
            raise ValueError("jet order mismatch: %d vs %d" % (self.order, other.order))

    # -- ring structure ------------------------------------------------

    def __add__(self, other):
        self._match(other)
        return JetSeries(self.order, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._match(other)
        return JetSeries(self.order, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return JetSeries(self.order, [-a for a in self.coeffs])

    def smul(self, s):
        s = QQi.of(s)
        return JetSeries(self.order, [a.smul(s) for a in self.coeffs])

    def __mul__(self, other):
        self._match(other)
        out = [PolyFn.zero() for _ in range(self.order + 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j in range(self.order + 1 - i):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return JetSeries(self.order, out)

    def inverse(self):
        """Multiplicative inverse; requires a constant invertible t^0 term."""
        c0 = self.coeffs[0]
        cdict = dict(c0.terms)
        if set(cdict) - {(0, 0, 0, 0)} or not cdict:
            raise ValueError("jet inverse needs a nonzero constant leading term")
        g0 = QQi(1) / cdict[(0, 0, 0, 0)]
        inv = [PolyFn.const(g0)]
        for k in range(1, self.order + 1):
            acc = PolyFn.zero()
            for j in range(1, k + 1):
                if not self.coeffs[j].is_zero():
                    acc = acc + self.coeffs[j] * inv[k - j]
            inv.append(-acc.smul(g0))
        return JetSeries(self.order, inv)

    # -- derivations (termwise) ------------------------------------------

    def z1(self):
        return JetSeries(self.order, [a.z1() for a in self.coeffs])

    def z1b(self):
        return JetSeries(self.order, [a.z1b() for a in self.coeffs])

    def t_op(self):
        return JetSeries(self.order, [a.t_op() for a in self.coeffs])

    def conj(self):
        return JetSeries(self.order, [a.conj() for a in self.coeffs])

    # -- queries -----------------------------------------------------------

    def is_zero(self):
        return all(a.is_zero() for a in self.coeffs)

    def degree(self):
        return max((a.degree() for a in self.coeffs), default=-1)

    def integrate(self):
        """Per-order exact integrals (list of Pi2Multiple)."""
        return [a.integrate() for a in self.coeffs]

    def evaluate(self, t):
        """Collapse the jet at an exact parameter value."""
        t = Fraction(t)
        acc = PolyFn.zero()
        tp = Fraction(1)
        for a in self.coeffs:
            if not a.is_zero():
                acc = acc + a.smul(QQi(tp))
            tp *= t
        return acc

    def truncate(self, _wd):
        """Spatial truncation is a grid-ring concern; jets stay exact."""
        return self

    def __eq__(self, other):
        return (
            isinstance(other, JetSeries)
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __repr__(self):
        live = [k for k, a in enumerate(self.coeffs) if not a.is_zero()]
        return "JetSeries(order=%d, nonzero at t^%r)" % (self.order, live)
