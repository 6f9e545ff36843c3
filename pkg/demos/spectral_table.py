"""Print the block eigenvalue tables and where they disagree.

The realized column is the scalar of the operator composition this package
actually applies (and inverts in the solver); the tabulated column holds the
classical printed constants. They coincide on the q=0 row and the critical
diagonal q=p+4 and differ on the q=1 row and strictly overcritical blocks.
"""

from fractions import Fraction

from crsphere import linear


def main():
    print("q in {0,1} rows (tabulated) vs realized diagonal")
    print("%4s %4s %14s %14s %7s" % ("p", "q", "tabulated", "realized", "same"))
    for q in (0, 1):
        for p in range(0, 7):
            tab = linear.dq_eigenvalue_q01(p, q)
            # on these rows the operator realizes d^2 - (2/3)(p+1)q d - d
            real = linear.dq_diagonal(p, q)
            print("%4d %4d %14s %14s %7s" % (p, q, tab, real, tab == real))

    print()
    print("reality-conditioned rows q >= p+4")
    print("%4s %4s %14s %14s %7s" % ("p", "q", "tabulated", "realized", "same"))
    for p in range(0, 4):
        for q in range(p + 4, p + 8):
            if p + q > 12:
                continue
            tab = linear.dq_eigenvalue_be(p, q)
            real = linear.realified_eigenvalue(p, q)
            print("%4d %4d %14s %14s %7s" % (p, q, tab, real, tab == real))

    print()
    ker = linear.kernel_report(8)
    print("kernel checks at degree 8: %s (%d low-sector, %d trivial, "
          "%d antisymmetric)" % ("ok" if ker["holds"] else "FAILED",
                                 ker["d0perp_vectors"],
                                 ker["trivial_directions"],
                                 ker["critical_antisymmetric"]))
    img = linear.image_report(8)
    print("image checks at degree 8: %s (real dim %d = %d)"
          % ("ok" if img["holds"] else "FAILED",
             img["domain_real_dim"], img["image_real_dim"]))

    scan = linear.bound_scan_eigenvalue_ratio(60, 120)
    print("eigenvalue/(1+p+q+2pq)^2 over p<=60, q<=120: min %s (%.5f) at %s,"
          " bound 1/48 = %.5f" % (scan["min_ratio"],
                                  float(Fraction(scan["min_ratio"])),
                                  scan["min_at"], 1 / 48))


if __name__ == "__main__":
    main()
