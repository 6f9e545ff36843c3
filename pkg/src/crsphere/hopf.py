"""Hopf-coordinate grid backend.

Coordinates z = cos(eta) e^{i xi1}, w = sin(eta) e^{i xi2}; the grid is a
product of Gauss-Legendre nodes in s = cos(2 eta) with uniform xi grids of
odd size, so

    integral f theta^dtheta = (1/2) (2 pi / n_xi)^2 sum_i w_i sum_{j,k} f_ijk

is exact for polynomial integrands of degree <= min(n_xi - 1, 4 n_eta - 2),
and harmonic analysis (projection onto H_{p,q}) is exact for degree
<= min((n_xi - 1)//2, 2 n_eta - 1).

Numeric fields are stored in coefficient space over the ladder basis

    le_{p,q,m} = Z1^q (z^{m+q} w^{p-m}),

on which the frame derivations act by pure index shifts:

    Z1  le_{p,q,m} = le_{p-1,q+1,m-1}            (zero when p = 0)
    Z1b le_{p,q,m} = -q(p+1) le_{p+1,q-1,m+1}    (zero when q = 0)
    T   le_{p,q,m} = i(p-q)  le_{p,q,m}

so derivatives are exact; only products and divisions touch grid values.
Conversion to the canonical basis (sigma scalars) happens at I/O boundaries.
"""

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .harmonic import e_basis, _component_coefficient
from .polyfn import PolyFn
from .scalars import QQi


class AliasingError(ValueError):
    """Polynomial degree exceeds the grid's documented exactness degree."""


# -- ladder basis cached data ---------------------------------------------


@lru_cache(maxsize=None)
def ladder_monomials(p, q, m):
    """Integer expansion of le_{p,q,m} over (r,s): z^{A-r} w^{B-s} zbar^s wbar^r.

    A = m+q, B = p-m; r+s = q. Built by iterating Z1 on z^A w^B.
    """
    A, B = m + q, p - m
    cur = {(0, 0): 1}
    for _ in range(q):
        nxt = {}
        for (r, s), c in cur.items():
            if A - r > 0:
                nxt[(r + 1, s)] = nxt.get((r + 1, s), 0) + (A - r) * c
            if B - s > 0:
                nxt[(r, s + 1)] = nxt.get((r, s + 1), 0) - (B - s) * c
        cur = nxt
    return cur


def ladder_polyfn(p, q, m):
    """le_{p,q,m} as an exact canonical PolyFn (for tests and sigma scalars)."""
    A, B = m + q, p - m
    raw = {}
    for (r, s), c in ladder_monomials(p, q, m).items():
        raw[(A - r, B - s, s, r)] = QQi(c)
    return PolyFn(raw)


@lru_cache(maxsize=None)
def ladder_norm_sq_rational(p, q, m):
    """||le_{p,q,m}||^2 / pi^2 as an exact Fraction.

    ||Z1^{j+1} u||^2 = p'(q'+1) ||Z1^j u||^2 on H_{p',q'}, starting from the
    monomial norm ||z^M w^{P-M}||^2 = 4 pi^2 M! (P-M)! / (P+1)!.
    """
    P, M = p + q, m + q
    acc = Fraction(4 * math.factorial(M) * math.factorial(P - M), math.factorial(P + 1))
    for j in range(q):
        acc *= (P - j) * (j + 1)
    return acc


@lru_cache(maxsize=None)
def sigma_scalar(p, q, m):
    """Exact real rational with le_{p,q,m} = sigma * e_{p,q,m}."""
    c = _component_coefficient(ladder_polyfn(p, q, m), p, q, m)
    if c.im != 0:
        raise AssertionError("sigma must be real")
    return c


def _profile_value(pp, qq, mm, c2):
    """Eta-profile of le at a rational cos^2 point, up to a common
    cos^(deg%2) sin^(deg%2) factor that cancels in conjugation ratios."""
    s2 = 1 - c2
    A, B = mm + qq, pp - mm
    acc = Fraction(0)
    for (r, s), c in ladder_monomials(pp, qq, mm).items():
        ce, se = A - r + s, B - s + r
        acc += Fraction(c) * c2 ** (ce // 2) * s2 ** (se // 2)
    return acc


@lru_cache(maxsize=None)
def conj_ratio(p, q, m):
    """Exact real rational kappa with conj(le_{p,q,m}) = kappa * le_{q,p,-m}.

    Both sides live on one weight line inside a single bigraded block, so
    their eta-profiles are proportional; the ratio is evaluated at a rational
    point (several candidates, in case one is a root of the profile).
    """
    for c2 in (Fraction(1, 3), Fraction(1, 5), Fraction(2, 7), Fraction(3, 11)):
        den = _profile_value(q, p, -m, c2)
        if den != 0:
            return _profile_value(p, q, m, c2) / den
    raise ArithmeticError("no usable evaluation point for conj ratio")


def _q0(m1, m2):
    return max(0, -m1, -m2, -(m1 + m2))


# -- grids ------------------------------------------------------------------


class HopfGrid:
    """Quadrature/collocation grid; see module docstring for exactness."""

    def __init__(self, n_eta, n_xi):
        if n_xi % 2 == 0:
            raise ValueError("n_xi must be odd so frequencies pair symmetrically")
        self.n_eta = int(n_eta)
        self.n_xi = int(n_xi)
        s, w = np.polynomial.legendre.leggauss(self.n_eta)
        self.s_nodes = s
        self.gl_weights = w
        self.cos_eta = np.sqrt((1.0 + s) / 2.0)
        self.sin_eta = np.sqrt((1.0 - s) / 2.0)
        xi = 2.0 * np.pi * np.arange(self.n_xi) / self.n_xi
        self.exp_xi = np.exp(1j * xi)
        self.quad_degree = min(self.n_xi - 1, 4 * self.n_eta - 2)
        self.analysis_degree = min((self.n_xi - 1) // 2, 2 * self.n_eta - 1)
        self._profiles = {}

    def integrate(self, values):
        """Integral against theta^dtheta of grid values (xi1, xi2, eta)."""
        s = values.sum(axis=(0, 1)) @ self.gl_weights
        return 0.5 * (2.0 * np.pi / self.n_xi) ** 2 * s

    def profile_matrix(self, m1, m2, length):
        """Rows: eta nodes; columns: ladder entries q = q0 .. q0+length-1."""
        key = (m1, m2)
        mat, norms = self._profiles.get(key, (np.zeros((self.n_eta, 0)), np.zeros(0)))
        have = mat.shape[1]
        if have < length:
            q0 = _q0(m1, m2)
            cols = [mat]
            extra = np.zeros((self.n_eta, length - have))
            nrm = np.zeros(length - have)
            for j in range(have, length):
                q = q0 + j
                p = m1 + m2 + q
                prof = np.zeros(self.n_eta)
                A, B = m1 + q, p - m1
                for (r, s), c in ladder_monomials(p, q, m1).items():
                    prof += float(c) * self.cos_eta ** (A - r + s) * self.sin_eta ** (B - s + r)
                extra[:, j - have] = prof
                nrm[j - have] = float(ladder_norm_sq_rational(p, q, m1)) * math.pi**2
            mat = np.concatenate([mat, extra], axis=1)
            norms = np.concatenate([norms, nrm])
            self._profiles[key] = (mat, norms)
        return self._profiles[key]

    def nodes_zw(self):
        """Complex (z, w) node values, broadcast to (n_xi, n_xi, n_eta)."""
        z = self.cos_eta[None, None, :] * self.exp_xi[:, None, None]
        w = self.sin_eta[None, None, :] * self.exp_xi[None, :, None]
        return z, w


@lru_cache(maxsize=None)
def grid_for_degree(deg):
    """Smallest cached grid whose analysis is exact to the given degree."""
    d = max(4, deg)
    d += (-d) % 4  # bucket to multiples of 4 to bound the cache
    return HopfGrid(n_eta=d // 2 + 1, n_xi=2 * d + 1)


# -- numeric coefficient fields --------------------------------------------


class CoefField:
    """Numeric field as {(m1,m2): complex vector over the ladder q-index}."""

    __slots__ = ("data",)

    def __init__(self, data=None):
        self.data = data if data is not None else {}

    @staticmethod
    def zero():
        return CoefField()

    @staticmethod
    def constant(value):
        if value == 0:
            return CoefField()
        return CoefField({(0, 0): np.array([complex(value)])})

    def copy(self):
        return CoefField({k: v.copy() for k, v in self.data.items()})

    def _cleaned(self):
        dead = [k for k, v in self.data.items() if not np.any(v)]
        for k in dead:
            del self.data[k]
        return self

    def entries(self):
        """Yield ((p, q, m), coefficient) over nonzero entries."""
        for (m1, m2), vec in self.data.items():
            q0 = _q0(m1, m2)
            for j, c in enumerate(vec):
                if c != 0:
                    q = q0 + j
                    yield (m1 + m2 + q, q, m1), c

    def degree(self):
        d = -1
        for (m1, m2), vec in self.data.items():
            nz = np.nonzero(vec)[0]
            if len(nz):
                q = _q0(m1, m2) + nz[-1]
                d = max(d, m1 + m2 + 2 * q)
        return d

    def set_entry(self, p, q, m, value):
        m1, m2 = m, p - m - q
        q0 = _q0(m1, m2)
        j = q - q0
        vec = self.data.get((m1, m2))
        if vec is None:
            vec = np.zeros(j + 1, dtype=complex)
        elif len(vec) <= j:
            vec = np.concatenate([vec, np.zeros(j + 1 - len(vec), dtype=complex)])
        vec[j] = value
        self.data[(m1, m2)] = vec

    # -- linear ops ------------------------------------------------------

    def __add__(self, other):
        out = self.copy()
        for key, vec in other.data.items():
            cur = out.data.get(key)
            if cur is None:
                out.data[key] = vec.copy()
            elif len(cur) >= len(vec):
                cur[: len(vec)] += vec
            else:
                new = vec.copy()
                new[: len(cur)] += cur
                out.data[key] = new
        return out._cleaned()

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, s):
        s = complex(s)
        return CoefField({k: v * s for k, v in self.data.items()})

    def smul(self, s):
        if isinstance(s, QQi):
            s = s.to_complex()
        elif not isinstance(s, complex):
            s = complex(float(s))
        return self.scale(s)

    # -- derivations -------------------------------------------------------

    def z1(self):
        out = CoefField()
        for (m1, m2), vec in self.data.items():
            q0 = _q0(m1, m2)
            n1, n2 = m1 - 1, m2 - 1
            nq0 = _q0(n1, n2)
            for j, c in enumerate(vec):
                if c == 0:
                    continue
                q = q0 + j
                p = m1 + m2 + q
                if p == 0:
                    continue
                tgt = out.data.get((n1, n2))
                jj = (q + 1) - nq0
                if tgt is None:
                    tgt = np.zeros(jj + 1, dtype=complex)
                elif len(tgt) <= jj:
                    tgt = np.concatenate([tgt, np.zeros(jj + 1 - len(tgt), dtype=complex)])
                tgt[jj] += c
                out.data[(n1, n2)] = tgt
        return out

    def z1b(self):
        out = CoefField()
        for (m1, m2), vec in self.data.items():
            q0 = _q0(m1, m2)
            n1, n2 = m1 + 1, m2 + 1
            nq0 = _q0(n1, n2)
            for j, c in enumerate(vec):
                if c == 0:
                    continue
                q = q0 + j
                if q == 0:
                    continue
                p = m1 + m2 + q
                tgt = out.data.get((n1, n2))
                jj = (q - 1) - nq0
                if tgt is None:
                    tgt = np.zeros(jj + 1, dtype=complex)
                elif len(tgt) <= jj:
                    tgt = np.concatenate([tgt, np.zeros(jj + 1 - len(tgt), dtype=complex)])
                tgt[jj] += -q * (p + 1) * c
                out.data[(n1, n2)] = tgt
        return out

    def t_op(self):
        return CoefField(
            {(m1, m2): vec * (1j * (m1 + m2)) for (m1, m2), vec in self.data.items()}
        )

    def conj(self):
        out = CoefField()
        for (p, q, m), c in self.entries():
            kap = float(conj_ratio(p, q, m))
            out.set_entry(q, p, -m, np.conj(c) * kap)
        return out

    # -- block structure ---------------------------------------------------

    def truncate(self, wd):
        out = CoefField()
        for (m1, m2), vec in self.data.items():
            q0 = _q0(m1, m2)
            keep = (wd - (m1 + m2)) // 2 - q0 + 1  # entries with p+q <= wd
            if keep > 0:
                out.data[(m1, m2)] = vec[: min(len(vec), keep)].copy()
        return out._cleaned()

    def restrict(self, pred):
        out = CoefField()
        for (p, q, m), c in self.entries():
            if pred(p, q):
                out.set_entry(p, q, m, c)
        return out

    def block_norm_sq(self, p, q):
        acc = 0.0
        for m in range(-q, p + 1):
            m1, m2 = m, p - m - q
            vec = self.data.get((m1, m2))
            if vec is None:
                continue
            j = q - _q0(m1, m2)
            if 0 <= j < len(vec) and vec[j] != 0:
                acc += abs(vec[j]) ** 2 * float(ladder_norm_sq_rational(p, q, m)) * math.pi**2
        return acc

    def blocks(self):
        return sorted({(p, q) for (p, q, _m), _c in self.entries()})

    def l2_norm_sq(self):
        acc = 0.0
        for (m1, m2), vec in self.data.items():
            q0 = _q0(m1, m2)
            for j, c in enumerate(vec):
                if c != 0:
                    q = q0 + j
                    p = m1 + m2 + q
                    acc += abs(c) ** 2 * float(ladder_norm_sq_rational(p, q, m1)) * math.pi**2
        return acc

    def l2_norm(self):
        return math.sqrt(max(self.l2_norm_sq(), 0.0))

    def integrate(self):
        """Exact in coefficients: 4 pi^2 times the constant-ladder q=0 entry."""
        vec = self.data.get((0, 0))
        if vec is None or len(vec) == 0:
            return 0.0j
        return complex(4.0 * math.pi**2 * vec[0])

    def is_zero(self):
        return not self.data

    # -- grid transforms -----------------------------------------------------

    def synthesize(self, grid):
        deg = self.degree()
        if deg > grid.analysis_degree:
            raise AliasingError(
                "field degree %d exceeds grid synthesis bound %d"
                % (deg, grid.analysis_degree)
            )
        F = np.zeros((grid.n_xi, grid.n_xi, grid.n_eta), dtype=complex)
        for (m1, m2), vec in self.data.items():
            mat, _ = grid.profile_matrix(m1, m2, len(vec))
            F[m1 % grid.n_xi, m2 % grid.n_xi, :] += mat[:, : len(vec)] @ vec
        return np.fft.ifft2(F, axes=(0, 1)) * grid.n_xi**2

    @staticmethod
    def analyze(values, grid, max_degree):
        if max_degree > grid.analysis_degree:
            raise AliasingError(
                "requested analysis degree %d exceeds grid bound %d"
                % (max_degree, grid.analysis_degree)
            )
        F = np.fft.fft2(values, axes=(0, 1))
        Fw = F * grid.gl_weights[None, None, :]
        pref = 0.5 * (2.0 * np.pi / grid.n_xi) ** 2
        half = (grid.n_xi - 1) // 2
        out = CoefField()
        for m1 in range(-half, half + 1):
            for m2 in range(-half, half + 1):
                if abs(m1 + m2) > max_degree:
                    continue
                q0 = _q0(m1, m2)
                length = (max_degree - (m1 + m2)) // 2 - q0 + 1
                if length <= 0:
                    continue
                mat, norms = grid.profile_matrix(m1, m2, length)
                proj = pref * (Fw[m1 % grid.n_xi, m2 % grid.n_xi, :] @ mat[:, :length])
                vec = proj / norms[:length]
                if np.any(np.abs(vec) > 0):
                    out.data[(m1, m2)] = vec
        return out._cleaned()

    def __repr__(self):
        return "CoefField(degree=%d, ladders=%d)" % (self.degree(), len(self.data))


# -- products and division ---------------------------------------------------


def multiply(a, b, work_degree):
    """Pointwise product, analyzed at full product degree, then truncated.

    The synthesis grid is sized for deg(a) + deg(b), so the analysis is exact
    and the only approximation is the explicit final truncation to
    work_degree (never aliasing).
    """
    da, db = a.degree(), b.degree()
    if da < 0 or db < 0:
        return CoefField.zero()
    target = da + db
    grid = grid_for_degree(target)
    va = a.synthesize(grid)
    vb = b.synthesize(grid)
    out = CoefField.analyze(va * vb, grid, min(target, work_degree))
    return out


def divide_by_positive(num, den, work_degree, floor=1e-12):
    """num / den with den real positive on the grid; truncation explicit."""
    dn, dd = num.degree(), den.degree()
    if dn < 0:
        return CoefField.zero()
    grid = grid_for_degree(max(dn, dd) + work_degree)
    vd = den.synthesize(grid)
    if np.max(np.abs(vd.imag)) > 1e-9 * max(1.0, np.max(np.abs(vd.real))):
        raise ValueError("denominator is not real on the grid")
    vr = vd.real
    if vr.min() <= floor:
        idx = np.unravel_index(np.argmin(vr), vr.shape)
        raise ValueError(
            "denominator vanishes on the grid (min %.3e at node %r)" % (vr.min(), idx)
        )
    vn = num.synthesize(grid)
    return CoefField.analyze(vn / vr, grid, work_degree)


# -- public sampling ops ------------------------------------------------------


def grid_sample(poly, grid):
    """Values of an exact polynomial function at the grid nodes."""
    e1 = grid.exp_xi[:, None, None]
    e2 = grid.exp_xi[None, :, None]
    ce = grid.cos_eta[None, None, :]
    se = grid.sin_eta[None, None, :]
    return poly.evaluate(ce, se, e1, e2)


def coef_from_harmonic(field):
    """HarmonicField (canonical basis) -> CoefField (ladder basis)."""
    out = CoefField()
    for (p, q, m), c in field.coeffs.items():
        val = c.to_complex() if isinstance(c, QQi) else complex(c)
        out.set_entry(p, q, m, val / float(sigma_scalar(p, q, m).re))
    return out._cleaned()


def coef_to_harmonic(cf, truncation):
    """CoefField -> float-mode HarmonicField in the canonical basis."""
    from .harmonic import HarmonicField

    out = HarmonicField(truncation, None, mode="float")
    for (p, q, m), c in cf.entries():
        if p + q <= truncation:
            val = complex(c) * float(sigma_scalar(p, q, m).re)
            if val != 0:
                out.coeffs[(p, q, m)] = val
    return out
