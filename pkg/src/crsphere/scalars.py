"""Exact scalar types: Gaussian rationals and rational multiples of pi^2.

gmpy2.mpq is used when available (it is much faster in the long product
chains of the jet pipeline); plain fractions.Fraction is a drop-in fallback.
"""

import math
from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _mpq = Fraction


def rational(num, den=1):
    """Exact rational scalar."""
    return _mpq(num, den)


def rat_from_str(s):
    """Parse 'a' or 'a/b' into an exact rational."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return _mpq(int(num), int(den))
    return _mpq(int(s))


def rat_to_str(r):
    """Render an exact rational as 'a' or 'a/b'."""
    r = _mpq(r)
    num, den = r.numerator, r.denominator
    if den == 1:
        return str(num)
    return "%d/%d" % (num, den)


_R0 = _mpq(0)
_R1 = _mpq(1)


class QQi:
    """Complex scalar with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _mpq(re)
        self.im = _mpq(im)

    @staticmethod
    def of(x):
        if isinstance(x, QQi):
            return x
        if isinstance(x, complex):
            raise TypeError("QQi.of refuses floats; use exact rationals")
        return QQi(x)

    def __add__(self, other):
        other = QQi.of(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = QQi.of(other)
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return QQi.of(other) - self

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __mul__(self, other):
        other = QQi.of(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return QQi(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QQi.of(other)
        c, d = other.re, other.im
        n = c * c + d * d
        if n == 0:
            raise ZeroDivisionError("division by zero QQi")
        a, b = self.re, self.im
        return QQi((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        return QQi.of(other) / self

    def __eq__(self, other):
        try:
            other = QQi.of(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def conj(self):
        return QQi(self.re, -self.im)

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def to_complex(self):
        return complex(float(self.re), float(self.im))

    def abs2(self):
        """|self|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    def __repr__(self):
        if self.im == 0:
            return rat_to_str(self.re)
        return "(%s%+si)" % (rat_to_str(self.re), rat_to_str(self.im))


QQI_ZERO = QQi(0)
QQI_ONE = QQi(1)
QQI_I = QQi(0, 1)


class Pi2Multiple:
    """Exact complex-rational multiple of pi^2 (the value of sphere integrals).

    Integrals of polynomial functions over the sphere with the contact volume
    form are Gaussian-rational multiples of pi^2, so equality is decidable.
    """

    __slots__ = ("coef",)

    def __init__(self, coef=QQI_ZERO):
        self.coef = QQi.of(coef)

    def __add__(self, other):
        return Pi2Multiple(self.coef + other.coef)

    def __sub__(self, other):
        return Pi2Multiple(self.coef - other.coef)

    def __neg__(self):
        return Pi2Multiple(-self.coef)

    def scale(self, s):
        return Pi2Multiple(self.coef * QQi.of(s))

    def __eq__(self, other):
        if not isinstance(other, Pi2Multiple):
            return NotImplemented
        return self.coef == other.coef

    def __hash__(self):
        return hash(("pi2", self.coef))

    def is_zero(self):
        return self.coef.is_zero()

    def to_complex(self):
        return self.coef.to_complex() * math.pi**2

    def to_float(self):
        v = self.to_complex()
        if abs(v.imag) > 1e-12 * max(1.0, abs(v.real)):
            raise ValueError("integral has a nonreal value: %r" % self)
        return v.real

    def __repr__(self):
        return "(%r)*pi^2" % (self.coef,)
