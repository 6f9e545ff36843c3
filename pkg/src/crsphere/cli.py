"""Command-line front end: pipeline runs, verification suites, solver.

Subcommands: compute, verify {spectra,bounds,identity,kernel,image},
solve, kuranishi, rigidity. Exit codes: 0 success / all pass, 1
verification failure, 2 input error, 3 solver divergence. Reports are
JSON with exact rationals as strings; fixed config plus seed gives
byte-identical output. The only environment knob is CRSPHERE_THREADS
(recorded in reports; the implementation itself is single-threaded).
"""

import argparse
import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import linear
from .deformed import DeformedStructure, GridRing, JetRing
from .harmonic import HarmonicField
from .hopf import CoefField
from .io import dump_report, load_field
from .scalars import QQi
from .solve import SolveConfig, partial_solve, rigidity_form_report, \
    rigidity_quadratic_form, second_order_obstruction

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_DIVERGED = 3


@dataclass
class RunConfig:
    command: str
    truncation: int = 8
    backend: str = "grid"
    order: int = 4
    tol: float = 1e-9
    seed: int = 7
    pmax: int = 200

    def __post_init__(self):
        if self.truncation < 4:
            raise ValueError("truncation must be >= 4, got %d" % self.truncation)
        if self.order < 2:
            raise ValueError("jet order must be >= 2, got %d" % self.order)
        if self.backend not in ("grid", "jet"):
            raise ValueError("backend must be 'grid' or 'jet'")


def _env_info():
    return {"threads": os.environ.get("CRSPHERE_THREADS", "1")}


def random_lattice_field(rng, degree, density=0.35, span=4, denom=8,
                         truncation=None):
    """Seeded draw with coefficients on the (1/denom) rational lattice."""
    n = truncation if truncation is not None else degree
    out = HarmonicField(n, None)
    for p in range(degree + 1):
        for q in range(degree + 1 - p):
            for m in range(-q, p + 1):
                if rng.random() >= density:
                    continue
                re = Fraction(rng.randint(-span, span), denom)
                im = Fraction(rng.randint(-span, span), denom)
                if re or im:
                    out.coeffs[(p, q, m)] = QQi(re, im)
    return out


def _emit(report, out_path):
    text = dump_report(report, out_path)
    if not out_path:
        sys.stdout.write(text)


# -- compute -------------------------------------------------------------------


def cmd_compute(args):
    field = load_field(args.input)
    n = args.degree
    report = {"command": "compute", "backend": args.backend,
              "input": args.input, "truncation": n, "env": _env_info()}
    if args.backend == "jet":
        if field.mode != "exact":
            raise ValueError("jet backend needs an exact-mode input field")
        ring = JetRing(args.order)
        st = DeformedStructure(ring.embed_field(field.truncate(n)), ring)
        report["order"] = args.order
        report["obstruction_integral_orders"] = st.obstruction_integral()
        report["identity"] = st.integral_identity()
        report["nonzero_orders"] = {
            name: [k for k in range(args.order + 1)
                   if not series.coefficient(k).is_zero()]
            for name, series in st.fields().items()
        }
    else:
        wd = max(2 * n, n + 4)
        ring = GridRing(wd)
        ff = field.to_float() if field.mode == "exact" else field
        st = DeformedStructure(ring.embed_field(ff.truncate(n)), ring)
        flds = st.fields()
        report["work_degree"] = wd
        report["norms"] = {name: cf.l2_norm() for name, cf in flds.items()}
        report["scalar_curvature_deviation"] = (
            st.scalar_curvature - CoefField.constant(2.0)
        ).l2_norm()
        report["obstruction_l2"] = st.obstruction.l2_norm()
        report["obstruction_integral"] = st.obstruction_integral()
        report["identity"] = st.integral_identity()
        report["h_min"] = ring.h_min
    _emit(report, args.out)
    return EXIT_OK


# -- verify --------------------------------------------------------------------


def _verify_spectra(args):
    degree = args.degree if args.degree is not None else 10
    rows = linear.spectra_rows(degree)
    key = "matches_tabulated" if args.table == "tabulated" else "matches_realized"
    failures = [r for r in rows if not (r[key] and r["pipeline_equals_composition"])]
    lines = []
    for r in rows:
        lines.append("%-12s p=%-2d q=%-2d %-6s tab=%-10s realized=%-10s %s" % (
            r["family"], r["p"], r["q"], r["mode"], r["tabulated"],
            r["realized"], "pass" if (r[key] and r["pipeline_equals_composition"])
            else "FAIL"))
    report = {"command": "verify", "suite": "spectra", "degree": degree,
              "table": args.table, "rows": rows,
              "failures": len(failures), "total": len(rows),
              "env": _env_info()}
    return report, lines, not failures


def _verify_bounds(args):
    pmax = args.pmax
    qmax = 2 * pmax
    s_eig = linear.bound_scan_eigenvalue_ratio(pmax, qmax)
    s_quartic = linear.bound_scan_quartic_ratio(pmax, qmax)
    ok = s_eig["holds"] and s_quartic["holds"]
    lines = [
        "projected-map ratio >= 1/48: %s (min %s at %s)"
        % ("pass" if s_eig["holds"] else "FAIL", s_eig["min_ratio"], s_eig["min_at"]),
        "quartic diagonal positive: %s (min %s at %s)"
        % ("pass" if s_quartic["holds"] else "FAIL", s_quartic["min_ratio"], s_quartic["min_at"]),
    ]
    report = {"command": "verify", "suite": "bounds", "pmax": pmax,
              "qmax": qmax, "projected": s_eig, "quartic": s_quartic,
              "env": _env_info()}
    return report, lines, ok


def _verify_identity(args):
    degree = args.degree if args.degree is not None else 4
    rng = random.Random(args.seed)
    draws = 20
    jet_rows = []
    grid_rows = []
    ok = True
    for k in range(draws):
        phi = random_lattice_field(rng, degree)
        ring = JetRing(args.order)
        st = DeformedStructure(ring.embed_field(phi), ring)
        ident = st.integral_identity()
        jet_rows.append({"draw": k, "exact": ident["exact"],
                         "residual": ident["residual"]})
        ok = ok and ident["exact"]
        scale = 1e-2 / max(phi.l2_norm(), 1e-9)
        pf = phi.to_float().scale(scale)
        gring = GridRing(max(2 * degree + 4, 8))
        gst = DeformedStructure(gring.embed_field(pf), gring)
        gident = gst.integral_identity()
        rel = gident["residual"] / (1.0 + abs(gident["lhs"]))
        grid_rows.append({"draw": k, "relative_residual": rel})
        ok = ok and rel <= args.tol
    worst = max(r["relative_residual"] for r in grid_rows)
    lines = [
        "jet identity exact on %d/%d draws" % (
            sum(1 for r in jet_rows if r["exact"]), draws),
        "grid identity worst relative residual %.3e (tol %.1e)" % (worst, args.tol),
    ]
    report = {"command": "verify", "suite": "identity", "degree": degree,
              "order": args.order, "seed": args.seed, "tol": args.tol,
              "jet": jet_rows, "grid": grid_rows, "worst_grid": worst,
              "env": _env_info()}
    return report, lines, ok


def _verify_kernel(args):
    degree = args.degree if args.degree is not None else 8
    rep = linear.kernel_report(degree)
    rep.update({"command": "verify", "suite": "kernel", "env": _env_info()})
    lines = ["kernel checks at degree %d: %s (%d low-sector, %d trivial, "
             "%d antisymmetric)" % (degree,
                                    "pass" if rep["holds"] else "FAIL",
                                    rep["d0perp_vectors"],
                                    rep["trivial_directions"],
                                    rep["critical_antisymmetric"])]
    return rep, lines, rep["holds"]


def _verify_image(args):
    degree = args.degree if args.degree is not None else 8
    rep = linear.image_report(degree)
    rep.update({"command": "verify", "suite": "image", "env": _env_info()})
    lines = ["image checks at degree %d: %s (domain dim %d, image dim %d)"
             % (degree, "pass" if rep["holds"] else "FAIL",
                rep["domain_real_dim"], rep["image_real_dim"])]
    return rep, lines, rep["holds"]


def cmd_verify(args):
    suites = {
        "spectra": _verify_spectra,
        "bounds": _verify_bounds,
        "identity": _verify_identity,
        "kernel": _verify_kernel,
        "image": _verify_image,
    }
    report, lines, ok = suites[args.suite](args)
    report["pass"] = ok
    if args.out:
        dump_report(report, args.out)
    for line in lines:
        print(line)
    print("verify %s: %s" % (args.suite, "PASS" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_VERIFY


# -- solve family ----------------------------------------------------------------


def _solve_config(args):
    return SolveConfig(
        truncation=args.degree,
        backend=args.backend,
        tol=args.tol,
        order=args.order,
    )


def _solve_report_doc(rep):
    return {
        "converged": rep.converged,
        "iterations": rep.iterations,
        "residual_history": rep.residual_history,
        "psi": rep.psi,
        "psi_l2": rep.psi.l2_norm(),
        "psi_in_dbe": rep.psi_in_dbe,
        "kuranishi": rep.kuranishi,
        "kuranishi_l2": rep.kuranishi.l2_norm(),
        "contraction_ratio": rep.contraction_ratio,
        "backend": rep.backend,
        "extra": rep.extra,
        "env": _env_info(),
    }


def cmd_solve(args):
    phi0 = load_field(args.input)
    rep = partial_solve(phi0, _solve_config(args))
    doc = _solve_report_doc(rep)
    doc["command"] = "solve"
    _emit(doc, args.out)
    return EXIT_OK if rep.converged else EXIT_DIVERGED


def cmd_kuranishi(args):
    phi0 = load_field(args.input)
    rep = partial_solve(phi0, _solve_config(args))
    doc = _solve_report_doc(rep)
    doc["command"] = "kuranishi"
    _emit(doc, args.out)
    return EXIT_OK if rep.converged else EXIT_DIVERGED


def cmd_rigidity(args):
    u = load_field(args.phidot)
    if u.mode != "exact":
        raise ValueError("rigidity expansion needs an exact-mode field")
    uddot = load_field(args.phiddot) if args.phiddot else None
    form = rigidity_quadratic_form(u)
    second = second_order_obstruction(u, uddot=uddot)
    matches = (second - form).is_zero()
    doc = {
        "command": "rigidity",
        "quadratic_form": form,
        "quadratic_form_float": form.to_float(),
        "second_order": second,
        "second_order_float": second.to_float(),
        "tabulated_matches_jet": matches,
        "uddot_supplied": uddot is not None,
        "comparability": rigidity_form_report(u),
        "env": _env_info(),
    }
    _emit(doc, args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(
        prog="crsphere",
        description="Deformed sphere pipeline: compute, verify, solve.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, degree_default):
        p.add_argument("--out", default=None, help="write JSON report here")
        p.add_argument("--degree", type=int, default=degree_default)
        p.add_argument("--backend", choices=("grid", "jet"), default="grid")
        p.add_argument("--order", type=int, default=4)
        p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--seed", type=int, default=7)

    pc = sub.add_parser("compute", help="run the full pipeline on a field")
    pc.add_argument("--input", required=True)
    common(pc, 8)
    pc.set_defaults(fn=cmd_compute)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("suite", choices=("spectra", "bounds", "identity",
                                      "kernel", "image"))
    pv.add_argument("--out", default=None)
    pv.add_argument("--degree", type=int, default=None)
    pv.add_argument("--order", type=int, default=4)
    pv.add_argument("--tol", type=float, default=1e-9)
    pv.add_argument("--seed", type=int, default=7)
    pv.add_argument("--pmax", type=int, default=200)
    pv.add_argument("--table", choices=("tabulated", "realized"),
                    default="tabulated")
    pv.set_defaults(fn=cmd_verify)

    ps = sub.add_parser("solve", help="partial solve for psi")
    ps.add_argument("--input", "--phi0", dest="input", required=True)
    common(ps, 8)
    ps.set_defaults(fn=cmd_solve)

    pk = sub.add_parser("kuranishi", help="solve and report the low-sector value")
    pk.add_argument("--input", "--phi0", dest="input", required=True)
    common(pk, 8)
    pk.set_defaults(fn=cmd_kuranishi)

    pr = sub.add_parser("rigidity", help="second-order quadratic form")
    pr.add_argument("--phidot", required=True)
    pr.add_argument("--phiddot", default=None)
    pr.add_argument("--out", default=None)
    pr.set_defaults(fn=cmd_rigidity)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command in ("compute", "solve", "kuranishi"):
            RunConfig(command=args.command, truncation=args.degree,
                      backend=args.backend, order=args.order,
                      tol=max(args.tol, 1e-300), seed=args.seed)
        return args.fn(args)
    except ValueError as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
