"""Solve away the solvable part of a small deformation and certify the rest.

Builds phi0 = eps * (unit H_{2,0} + 0.5 * unit H_{3,1}), runs the grid
fixed-point solver, prints the residual staircase and the Kuranishi value,
then evaluates the non-flatness certificate on the corrected structure.
A jet-backend run on the H_{2,0} piece cross-checks the first psi orders.
"""

from fractions import Fraction

from crsphere.harmonic import HarmonicField, unit_block_vector
from crsphere.scalars import QQi
from crsphere.solve import (SolveConfig, partial_solve, rigidity_certificate)

EPS = 1e-2


def main():
    u = unit_block_vector(2, 0, 0, truncation=6) \
        + unit_block_vector(3, 1, 1, truncation=6).scale(0.5)
    phi0 = u.scale(EPS)
    cfg = SolveConfig(truncation=6, backend="grid", tol=1e-12)

    rep = partial_solve(phi0, cfg)
    print("converged: %s in %d iterations" % (rep.converged, rep.iterations))
    for k, r in enumerate(rep.residual_history):
        print("  iter %d  residual %.3e" % (k, r))
    print("psi l2 = %.6e  (psi/eps^2 = %.5f)"
          % (rep.psi.l2_norm(), rep.psi.l2_norm() / EPS ** 2))
    print("psi blocks:", sorted(rep.psi.blocks()))
    print("kuranishi value l2 = %.6e  (~ eps^2)" % rep.kuranishi.l2_norm())

    cert = rigidity_certificate(phi0 + rep.psi, cfg)
    print("certificate: solvable-sector obstruction %.3e, integral %.6e,"
          % (cert["p_im_norm"], cert["integral"]))
    print("             certified non-flat: %s" % cert["certified_nonflat"])

    jet_cfg = SolveConfig(truncation=6, backend="jet", order=4)
    exact_h20 = HarmonicField(6, {(2, 0, 0): QQi(Fraction(1, 100))})
    jrep = partial_solve(exact_h20, jet_cfg)
    nonzero = [k for k, fk in enumerate(jrep.extra["psi_orders"])
               if not fk.is_zero()]
    print("jet backend on an exact H_{2,0} input: converged=%s, "
          "nonzero psi orders: %s" % (jrep.converged, nonzero))


if __name__ == "__main__":
    main()
