"""Bigraded spherical harmonics H_{p,q} on S^3 and coefficient fields.

H_{p,q} is the joint eigenspace T = i(p-q), Delta_b = 2pq+p+q inside the
polynomial functions; dim H_{p,q} = p+q+1, indexed by m in [-q, p] (the
z-weight of the representative monomial). The canonical basis element
e_{p,q,m} is the harmonic projection of

    z^m w^{p-m} wbar^q          (m >= 0)
    zbar^{-m} w^p wbar^{q+m}    (m < 0)

computed exactly by a Lagrange eigenprojector in Delta_b along the torus
weight ladder. With this normalization conj(e_{p,q,m}) = e_{q,p,-m} holds
with coefficient exactly 1.
"""

import math
from functools import lru_cache

from .polyfn import PolyFn, sublaplacian
from .scalars import QQi, Pi2Multiple, rational


def block_dim(p, q):
    return p + q + 1


def t_eigenvalue(p, q):
    """T acts on H_{p,q} by i(p-q)."""
    return p - q


def sublap_eigenvalue(p, q):
    """Delta_b acts on H_{p,q} by 2pq + p + q."""
    return 2 * p * q + p + q


def representative_monomial(p, q, m):
    if not (-q <= m <= p):
        raise ValueError("m=%d out of range [-%d, %d]" % (m, q, p))
    if m >= 0:
        return PolyFn.monomial(m, p - m, 0, q)
    return PolyFn.monomial(0, p, -m, q + m)


def _ladder_project(f, levels, target):
    """Lagrange projector onto the Delta_b level `target` within `levels`."""
    out = f
    for lam in levels:
        if lam == target:
            continue
        out = (sublaplacian(out) - out.smul(lam)).smul(rational(1, target - lam))
    return out


@lru_cache(maxsize=None)
def e_basis(p, q, m):
    """Canonical basis element of H_{p,q} with torus weight (m, p-m-q)."""
    rep = representative_monomial(p, q, m)
    k = min(p, q)
    levels = [sublap_eigenvalue(p - j, q - j) for j in range(k + 1)]
    return _ladder_project(rep, levels, sublap_eigenvalue(p, q))


def harmonic_basis(p, q):
    """All of H_{p,q}, ordered by m from -q to p."""
    return [e_basis(p, q, m) for m in range(-q, p + 1)]


@lru_cache(maxsize=None)
def e_norm_sq(p, q, m):
    """Exact ||e_{p,q,m}||^2 (a positive rational multiple of pi^2)."""
    return e_basis(p, q, m).norm_sq()


def _weight_levels(f_w, m1, m2):
    """Possible Delta_b levels of a weight-(m1,m2) component, by degree."""
    dmin = abs(m1) + abs(m2)
    dmax = f_w.degree()
    t = m1 + m2
    levels = []
    for s in range(dmin, dmax + 1, 2):
        pp, qq = (s + t) // 2, (s - t) // 2
        if pp >= 0 and qq >= 0:
            levels.append((pp, qq))
    return levels


def project_pq(u, p, q):
    """Exact projection of a polynomial function onto H_{p,q}."""
    out = PolyFn.zero()
    target = sublap_eigenvalue(p, q)
    for (m1, m2), f_w in u.weight_components().items():
        if m1 + m2 != p - q:
            continue
        blocks = _weight_levels(f_w, m1, m2)
        if (p, q) not in blocks:
            continue
        levels = [sublap_eigenvalue(a, b) for (a, b) in blocks]
        out = out + _ladder_project(f_w, levels, target)
    return out


def _component_coefficient(h, p, q, m):
    """Scalar c with h = c * e_{p,q,m} (h known to lie in that weight line)."""
    e = e_basis(p, q, m)
    key = next(iter(e.terms))
    return h.terms.get(key, QQi(0)) / e.terms[key]


def to_harmonic(u, truncation=None):
    """Expand a polynomial function in the canonical harmonic basis."""
    coeffs = {}
    maxdeg = 0
    for (m1, m2), f_w in u.weight_components().items():
        blocks = _weight_levels(f_w, m1, m2)
        levels = [sublap_eigenvalue(a, b) for (a, b) in blocks]
        for (p, q) in blocks:
            if truncation is not None and p + q > truncation:
                continue
            h = _ladder_project(f_w, levels, sublap_eigenvalue(p, q))
            if h.is_zero():
                continue
            c = _component_coefficient(h, p, q, m1)
            if not c.is_zero():
                coeffs[(p, q, m1)] = c
                maxdeg = max(maxdeg, p + q)
    n = truncation if truncation is not None else maxdeg
    return HarmonicField(n, coeffs, mode="exact")


def from_harmonic(field):
    """Synthesize the polynomial function of an exact-mode field."""
    if field.mode != "exact":
        raise ValueError("from_harmonic requires an exact-mode field")
    out = PolyFn.zero()
    for (p, q, m), c in field.coeffs.items():
        out = out + e_basis(p, q, m).smul(c)
    return out


# -- blockwise derivation scalars ----------------------------------------


@lru_cache(maxsize=None)
def z1_scalar(p, q, m):
    """Z1 e_{p,q,m} = z1_scalar * e_{p-1,q+1,m-1}; zero when p == 0."""
    if p == 0:
        return QQi(0)
    img = e_basis(p, q, m).z1()
    if img.is_zero():
        return QQi(0)
    return _component_coefficient(img, p - 1, q + 1, m - 1)


@lru_cache(maxsize=None)
def z1b_scalar(p, q, m):
    """Z1b e_{p,q,m} = z1b_scalar * e_{p+1,q-1,m+1}; zero when q == 0."""
    if q == 0:
        return QQi(0)
    img = e_basis(p, q, m).z1b()
    if img.is_zero():
        return QQi(0)
    return _component_coefficient(img, p + 1, q - 1, m + 1)


def zbar2_scalar(p, q, m):
    """(Z1b)^2 e_{p,q,m} relative to e_{p+2,q-2,m+2}; zero when q <= 1."""
    if q <= 1:
        return QQi(0)
    return z1b_scalar(p, q, m) * z1b_scalar(p + 1, q - 1, m + 1)


# -- coefficient fields ----------------------------------------------------


class HarmonicField:
    """Coefficients over the canonical basis, up to degree p+q <= truncation.

    mode "exact" stores QQi coefficients, mode "float" stores complex. The
    basis is shared by both backends, so fields round-trip through JSON and
    across backends without basis bookkeeping.
    """

    __slots__ = ("truncation", "coeffs", "mode")

    def __init__(self, truncation, coeffs=None, mode="exact"):
        self.truncation = int(truncation)
        self.mode = mode
        self.coeffs = {}
        if coeffs:
            for key, val in coeffs.items():
                self._set(key, val)

    def _set(self, key, val):
        p, q, m = key
        if p + q > self.truncation:
            raise ValueError("block (%d,%d) beyond truncation %d" % (p, q, self.truncation))
        if not (-q <= m <= p):
            raise ValueError("bad index m=%d for block (%d,%d)" % (m, p, q))
        if self.mode == "exact":
            val = QQi.of(val)
            if not val.is_zero():
                self.coeffs[key] = val
        else:
            val = complex(val)
            if val != 0:
                self.coeffs[key] = val

    # -- linear structure ---------------------------------------------

    def _assert_compatible(self, other):
        if self.mode != other.mode:
            raise ValueError("mixed exact/float field arithmetic")

    def __add__(self, other):
        self._assert_compatible(other)
        n = max(self.truncation, other.truncation)
        out = HarmonicField(n, self.coeffs, self.mode)
        for key, val in other.coeffs.items():
            prev = out.coeffs.get(key)
            s = val if prev is None else prev + val
            if (s.is_zero() if self.mode == "exact" else s == 0):
                out.coeffs.pop(key, None)
            else:
                out.coeffs[key] = s
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s):
        if self.mode == "exact":
            s = QQi.of(s)
            return HarmonicField(
                self.truncation,
                {k: v * s for k, v in self.coeffs.items()},
                "exact",
            )
        s = complex(s)
        return HarmonicField(
            self.truncation,
            {k: v * s for k, v in self.coeffs.items()},
            "float",
        )

    def conj(self):
        """conj(e_{p,q,m}) = e_{q,p,-m} exactly, so conjugation is index flip."""
        out = {}
        for (p, q, m), c in self.coeffs.items():
            cc = c.conj() if self.mode == "exact" else c.conjugate()
            out[(q, p, -m)] = cc
        return HarmonicField(self.truncation, out, self.mode)

    def is_real(self, tol=0.0):
        if self.mode == "exact":
            return self.conj().coeffs == self.coeffs
        diff = self - self.conj()
        return diff.l2_norm() <= tol

    def truncate(self, n):
        out = HarmonicField(n, None, self.mode)
        for (p, q, m), c in self.coeffs.items():
            if p + q <= n:
                out.coeffs[(p, q, m)] = c
        return out

    def restrict(self, pred):
        """Keep blocks (p,q) with pred(p,q) true."""
        out = HarmonicField(self.truncation, None, self.mode)
        for (p, q, m), c in self.coeffs.items():
            if pred(p, q):
                out.coeffs[(p, q, m)] = c
        return out

    def blocks(self):
        return sorted({(p, q) for (p, q, _m) in self.coeffs})

    def is_zero(self):
        return not self.coeffs

    # -- norms ----------------------------------------------------------

    def block_norm_sq(self, p, q):
        """Exact mode: Pi2Multiple; float mode: float."""
        if self.mode == "exact":
            acc = Pi2Multiple(QQi(0))
            for m in range(-q, p + 1):
                c = self.coeffs.get((p, q, m))
                if c is not None:
                    acc = acc + e_norm_sq(p, q, m).scale(c.abs2())
            return acc
        acc = 0.0
        for m in range(-q, p + 1):
            c = self.coeffs.get((p, q, m))
            if c is not None:
                acc += abs(c) ** 2 * e_norm_sq(p, q, m).to_float()
        return acc

    def l2_norm_sq(self):
        if self.mode == "exact":
            acc = Pi2Multiple(QQi(0))
            for (p, q) in self.blocks():
                acc = acc + self.block_norm_sq(p, q)
            return acc
        return sum(self.block_norm_sq(p, q) for (p, q) in self.blocks())

    def l2_norm(self):
        n = self.l2_norm_sq()
        if isinstance(n, Pi2Multiple):
            n = n.to_float()
        return math.sqrt(max(n, 0.0))

    def fs_norm(self, s):
        """Folland-Stein style norm: sum (1+p+q+2pq)^s ||u_{p,q}||^2, sqrt."""
        acc = 0.0
        for (p, q) in self.blocks():
            b = self.block_norm_sq(p, q)
            if isinstance(b, Pi2Multiple):
                b = b.to_float()
            acc += (1 + p + q + 2 * p * q) ** float(s) * b
        return math.sqrt(max(acc, 0.0))

    def inner(self, other):
        """L^2 pairing; exact mode returns Pi2Multiple."""
        self._assert_compatible(other)
        if self.mode == "exact":
            acc = Pi2Multiple(QQi(0))
            for key, c in self.coeffs.items():
                d = other.coeffs.get(key)
                if d is not None:
                    p, q, m = key
                    acc = acc + e_norm_sq(p, q, m).scale(c * d.conj())
            return acc
        acc = 0.0j
        for key, c in self.coeffs.items():
            d = other.coeffs.get(key)
            if d is not None:
                p, q, m = key
                acc += c * d.conjugate() * e_norm_sq(p, q, m).to_float()
        return acc

    def to_float(self):
        if self.mode == "float":
            return self
        return HarmonicField(
            self.truncation,
            {k: v.to_complex() for k, v in self.coeffs.items()},
            "float",
        )

    def __repr__(self):
        return "HarmonicField(n=%d, %d coefficients, %s)" % (
            self.truncation,
            len(self.coeffs),
            self.mode,
        )


def unit_block_vector(p, q, m, truncation=None):
    """Float-mode basis field e_{p,q,m}/||e_{p,q,m}|| as a HarmonicField."""
    n = truncation if truncation is not None else p + q
    c = 1.0 / math.sqrt(e_norm_sq(p, q, m).to_float())
    return HarmonicField(n, {(p, q, m): c}, mode="float")
