"""Deformed CR structures on the sphere and their curvature invariants.

A deformation is a single tensor field phi; the deformed frame is

    Zt1  X = Z1 X + phi  * Z1b X
    Zt1b X = Z1b X + conj(phi) * Z1 X

with metric factor htilde = 1 - phi conj(phi) (positivity required). From
these the pipeline computes the connection coefficients, torsion, scalar
curvature, the fourth-order tensor q11 (two lower indices), and the scalar
obstruction density. The whole chain is written once over a ring interface
and runs in two rings:

    JetRing(order)        exact formal jets in the deformation parameter
    GridRing(work_degree) numeric coefficient fields, products and divisions
                          materialized on Hopf grids and truncated back to
                          work_degree (truncation, never aliasing)

Division only ever happens by powers of htilde; the jet ring inverts it as
a formal series, the grid ring divides pointwise and checks positivity at
the nodes.
"""

from fractions import Fraction

import numpy as np

from .harmonic import from_harmonic, to_harmonic
from .hopf import CoefField, coef_from_harmonic, grid_for_degree
from .jets import JetSeries
from .scalars import QQi

I = QQi(0, 1)


class JetRing:
    """Formal-deformation ring; every operation is exact."""

    mode = "jet"

    def __init__(self, order):
        self.order = int(order)
        self._hinv_pows = None

    def embed(self, poly, power=1):
        return JetSeries.of_polyfn(poly, self.order, power)

    def embed_field(self, field, power=1):
        return self.embed(from_harmonic(field), power)

    def one(self):
        return JetSeries.one(self.order)

    def mul(self, a, b):
        return a * b

    def set_h(self, htilde):
        hinv = htilde.inverse()
        self._hinv_pows = {0: self.one(), 1: hinv}

    def div_h(self, x, k=1):
        pows = self._hinv_pows
        while k not in pows:
            j = max(pows)
            pows[j + 1] = pows[j] * pows[1]
        return x * pows[k]

    def integrate(self, x):
        return x.integrate()


class GridRing:
    """Numeric ring; see module docstring for truncation semantics."""

    mode = "grid"

    def __init__(self, work_degree, h_floor=1e-8):
        self.work_degree = int(work_degree)
        self.h_floor = float(h_floor)
        self._h = None
        self._h_values = {}
        self.h_min = None

    def embed_field(self, field):
        return coef_from_harmonic(field)

    def one(self):
        return CoefField.constant(1.0)

    def mul(self, a, b):
        from .hopf import multiply

        return multiply(a, b, self.work_degree)

    def set_h(self, htilde):
        self._h = htilde
        self._h_values = {}
        self.h_min = None

    def _h_on(self, grid):
        vals = self._h_values.get(grid)
        if vals is None:
            raw = self._h.synthesize(grid)
            if np.abs(raw.imag).max() > 1e-9:
                raise ValueError("metric factor is not real on the grid")
            vals = raw.real
            if vals.min() <= self.h_floor:
                idx = tuple(int(i) for i in np.unravel_index(vals.argmin(), vals.shape))
                raise ValueError(
                    "deformation not admissible: metric factor %.3e at node %r"
                    % (vals.min(), idx)
                )
            self._h_values[grid] = vals
            self.h_min = vals.min() if self.h_min is None else min(self.h_min, vals.min())
        return vals

    def div_h(self, x, k=1):
        if x.is_zero():
            return x
        grid = grid_for_degree(2 * self.work_degree)
        hv = self._h_on(grid)
        return CoefField.analyze(x.synthesize(grid) / hv**k, grid, self.work_degree)

    def integrate(self, x):
        return x.integrate()


class DeformedStructure:
    """All structure fields of a deformed sphere, computed eagerly.

    Attributes (ring elements): phi, phib, htilde, a11, a1b1b, om_t, om_z1,
    om_z1b (connection coefficient against T, Zt1, Zt1b), scalar_curvature,
    q11, q1_up, q_upup, obstruction.
    """

    def __init__(self, phi, ring):
        R = ring
        self.ring = R
        self.phi = phi
        phib = phi.conj()
        self.phib = phib
        absphi2 = R.mul(phi, phib)
        self.htilde = R.one() - absphi2
        R.set_h(self.htilde)

        zt1, zt1b = self.zt1, self.zt1b

        nab0_phi = phi.t_op() + phi.smul(QQi(0, 4))
        self.a11 = nab0_phi.smul(QQi(-1))
        self.a1b1b = self.a11.conj()

        self.om_t = R.one().smul(QQi(0, -2)) - R.div_h(R.mul(phib, nab0_phi), 1)
        self.om_z1 = phi.z1b()
        self.om_z1b = phib.z1().smul(QQi(-1)) - R.div_h(zt1b(absphi2), 1)

        t123 = (
            R.mul(phib, nab0_phi).smul(QQi(0, -1))
            - zt1(phib.z1())
            - zt1b(phi.z1b())
        )
        t4 = R.mul(zt1(absphi2), zt1b(absphi2))
        t5 = zt1(zt1b(absphi2))
        self.scalar_curvature = (
            R.one().smul(QQi(2)) + R.div_h(t123, 1) - R.div_h(t4, 3) - R.div_h(t5, 2)
        )

        rc = self.scalar_curvature
        zt1_r = zt1(rc)
        term1 = (zt1(zt1_r) - R.mul(self.om_z1, zt1_r)).smul(QQi(Fraction(-1, 6)))
        term2 = R.mul(rc, self.a11).smul(QQi(0, Fraction(-1, 2)))
        term3 = self.a11.t_op() - R.mul(self.om_t, self.a11).smul(QQi(2))
        b = R.div_h(zt1b(self.a11) - R.mul(self.om_z1b, self.a11).smul(QQi(2)), 1)
        term4 = (zt1(b) - R.mul(self.om_z1, b)).smul(QQi(0, Fraction(2, 3)))
        self.q11 = term1 + term2 + term3 + term4

        self.q1_up = R.div_h(self.q11, 1)
        self.q_upup = R.div_h(self.q11, 2)

        om_conj = self.om_z1.conj()
        g = zt1b(self.q_upup) + R.mul(om_conj, self.q_upup).smul(QQi(2))
        self.obstruction = (
            zt1b(g) + R.mul(om_conj, g) - R.mul(self.a1b1b, self.q_upup).smul(QQi(0, 1))
        )

    # -- deformed frame -----------------------------------------------------

    def zt1(self, x):
        return x.z1() + self.ring.mul(self.phi, x.z1b())

    def zt1b(self, x):
        return x.z1b() + self.ring.mul(self.phib, x.z1())

    def fields(self):
        return {
            "phi": self.phi,
            "htilde": self.htilde,
            "a11": self.a11,
            "om_t": self.om_t,
            "om_z1": self.om_z1,
            "om_z1b": self.om_z1b,
            "scalar_curvature": self.scalar_curvature,
            "q11": self.q11,
            "obstruction": self.obstruction,
        }

    # -- integral checks ------------------------------------------------------

    def obstruction_integral(self):
        return self.ring.integrate(self.obstruction)

    def integral_identity(self):
        """Total obstruction vs the first-variation pairing integral.

        The integral of the obstruction density equals

            i * integral (T - 4i)(conj phi) * q1_up / htilde,

        the two differing pointwise by an exact divergence. Returns lhs,
        rhs and a float residual (exact zeros in the jet ring).
        """
        R = self.ring
        integrand = R.mul(
            self.a1b1b, R.div_h(self.q1_up, 1)
        ).smul(QQi(0, -1))
        lhs = R.integrate(self.obstruction)
        rhs = R.integrate(integrand)
        if R.mode == "jet":
            diffs = [a - b for a, b in zip(lhs, rhs)]
            residual = max((abs(d.to_complex()) for d in diffs), default=0.0)
            exact = all(d.is_zero() for d in diffs)
        else:
            residual = abs(lhs - rhs)
            exact = residual == 0.0
        return {"lhs": lhs, "rhs": rhs, "residual": residual, "exact": exact}


def metric_compatibility_residual(st):
    """om_z1b + conj(om_z1) - Zt1b(htilde)/htilde; zero for the computed
    connection, which is what makes raise-then-differentiate consistent."""
    R = st.ring
    lhs = st.om_z1b + st.om_z1.conj()
    rhs = R.div_h(st.zt1b(st.htilde), 1)
    return lhs - rhs


def linearization_check(phi_hat):
    """Leading t-coefficient of the nonlinear q11 pipeline vs the linear map.

    phi_hat: exact-mode HarmonicField. Runs the full nonlinear pipeline on
    t*phi_hat in the jet ring and extracts the t^1 coefficient of q11; a
    nonzero difference against the block-diagonal linear operator flags a
    sign or normalization convention error. Returns the exact residual.
    """
    from .linear import dq_apply

    ring = JetRing(1)
    st = DeformedStructure(ring.embed_field(phi_hat), ring)
    got = to_harmonic(st.q11.coefficient(1), truncation=None)
    want = dq_apply(phi_hat)
    n = max(got.truncation, want.truncation)
    diff = _repad(got, n) - _repad(want, n)
    return {
        "match": diff.is_zero(),
        "residual_sq": diff.l2_norm_sq(),
        "pipeline": got,
        "operator": want,
    }


def _repad(field, n):
    from .harmonic import HarmonicField

    return HarmonicField(n, dict(field.coeffs), mode=field.mode)
