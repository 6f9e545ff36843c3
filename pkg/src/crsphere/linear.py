"""Blockwise linear theory of the deformation problem at the round sphere.

The linearized tensor map acts on a bigraded block H_{p,q} by an exact
rational diagonal scalar plus, for q >= 4, an antilinear cross term into
H_{q-4,p+4}; composing with the squared lowering derivative gives the
linearized obstruction map, whose image sits in real blocks with
p,q >= 2. Everything here is assembled from the exact block scalars of
harmonic_core, so applications, projections, and the block inverse used by
the solver are exact in exact mode.

Two eigenvalue tables coexist deliberately:

  * dq_eigenvalue_be / dq_eigenvalue_q01 return the TABULATED constants
    (the classical printed values for the q <= 1 rows and the q >= p+4
    rows). These feed the bound scans.
  * dq_diagonal / realified_eigenvalue return the REALIZED scalars of the
    operator composition actually implemented here (they agree with the
    tabulated ones on the q = 0 row and the critical diagonal, and differ
    on the q = 1 and q > p+4 rows by the sign of the mixed second-order
    term). These feed the solver, which must invert the operator that is
    actually applied.

verify-style report builders at the bottom compare all of: nonlinear
pipeline t-coefficient, operator composition, and both tables.
"""

from fractions import Fraction

from .harmonic import HarmonicField, to_harmonic, z1_scalar, zbar2_scalar
from .scalars import QQi

SPACE_TAGS = ("D0", "D0perp", "DBE", "DBEprime", "H1O", "H2O", "Im_DO")


# -- eigenvalue tables -------------------------------------------------------


def quartic_diagonal(p, q):
    """Diagonal of the fourth-order raise-lower composition; zero for q < 2."""
    if q < 2:
        return Fraction(0)
    return Fraction((p + 1) * (p + 2) * (q - 1) * q, 6)


def dq_diagonal(p, q):
    """Realized diagonal scalar of the linearized tensor map on H_{p,q}."""
    d = p - q + 4
    return d * d - Fraction(2 * (p + 1) * q * d, 3) - d + quartic_diagonal(p, q)


def realified_eigenvalue(p, q):
    """Realized scalar on the reality-conditioned blocks, q >= p+4.

    Critical diagonal q = p+4: the symmetric (J-fixed) vectors see twice the
    diagonal because the cross term reinforces it; strictly overcritical
    blocks see the plain diagonal, which factors as
    (1/6)(p+3)(p+4)(q-2)(q-3).
    """
    if q < p + 4:
        raise ValueError("realified table needs q >= p+4, got (%d,%d)" % (p, q))
    if q == p + 4:
        return 2 * dq_diagonal(p, q)
    return dq_diagonal(p, q)


def dq_eigenvalue_q01(p, q):
    """Tabulated constants for the q in {0,1} rows."""
    if q not in (0, 1):
        raise ValueError("row table covers q in {0,1}, got q=%d" % q)
    d = p - q + 4
    return d * d + Fraction(2 * (p + 1) * q * d, 3) - d


def dq_eigenvalue_be(p, q):
    """Tabulated constants for the projected map on blocks with q >= p+4."""
    if q < p + 4:
        raise ValueError("tabulated row needs q >= p+4, got (%d,%d)" % (p, q))
    if q == p + 4:
        return Fraction((p + 1) * (p + 2) * (q - 1) * q, 3)
    d = q - p - 4
    return (
        Fraction((p + 1) * (p + 2) * (q - 1) * q, 6)
        + d * d
        - Fraction(2 * (p + 1) * q * d, 3)
        + d
    )


def image_block_scalar(P, Q):
    """Scalar by which the obstruction map reaches image block (P,Q), P<=Q."""
    if P < 2 or Q < P:
        raise ValueError("image blocks need 2 <= P <= Q, got (%d,%d)" % (P, Q))
    return realified_eigenvalue(P - 2, Q + 2)


# -- blockwise applications ---------------------------------------------------


def _out_like(u, truncation=None):
    return HarmonicField(truncation if truncation is not None else u.truncation,
                         None, mode=u.mode)


def _accum(out, key, val):
    prev = out.coeffs.get(key)
    s = val if prev is None else prev + val
    if (s.is_zero() if out.mode == "exact" else s == 0):
        out.coeffs.pop(key, None)
    else:
        out.coeffs[key] = s


def _cast(scalar, mode):
    if mode == "exact":
        return QQi.of(scalar)
    if isinstance(scalar, QQi):
        return scalar.to_complex()
    return complex(scalar)


def _cross_chain(q, p, m):
    """Scalar of the four-fold raising chain out of H_{q,p} at mode m."""
    acc = QQi(1)
    pp, qq, mm = q, p, m
    for _ in range(4):
        acc = acc * z1_scalar(pp, qq, mm)
        pp, qq, mm = pp - 1, qq + 1, mm - 1
    return acc


def dq_apply(u):
    """Linearized tensor map, blockwise (exact in exact mode)."""
    out = _out_like(u)
    sixth = Fraction(1, 6)
    for (p, q, m), c in u.coeffs.items():
        _accum(out, (p, q, m), c * _cast(dq_diagonal(p, q), u.mode))
        if q >= 4:
            s = _cross_chain(q, p, -m)
            cc = c.conj() if u.mode == "exact" else c.conjugate()
            _accum(out, (q - 4, p + 4, -m - 4), cc * _cast(s, u.mode) * _cast(sixth, u.mode))
    return out


def zbar2_apply(u):
    out = _out_like(u)
    for (p, q, m), c in u.coeffs.items():
        if q >= 2:
            _accum(out, (p + 2, q - 2, m + 2), c * _cast(zbar2_scalar(p, q, m), u.mode))
    return out


def z1_apply(u):
    out = _out_like(u)
    for (p, q, m), c in u.coeffs.items():
        if p >= 1:
            _accum(out, (p - 1, q + 1, m - 1), c * _cast(z1_scalar(p, q, m), u.mode))
    return out


def do_apply(u):
    """Linearized obstruction map: squared lowering after dq_apply."""
    return zbar2_apply(dq_apply(u))


def resolvent_sublaplacian(u):
    """Divide each (p,q) block by 1 + p + q + 2pq (exact in exact mode)."""
    out = _out_like(u)
    for (p, q, m), c in u.coeffs.items():
        w = Fraction(1, 1 + p + q + 2 * p * q)
        _accum(out, (p, q, m), c * _cast(w, u.mode))
    return out


# -- deformation spaces --------------------------------------------------------


def _half_of(u):
    return QQi(Fraction(1, 2)) if u.mode == "exact" else 0.5


def real_part(u):
    return (u + u.conj()).scale(_half_of(u))


def j_critical(u, p):
    """Antilinear involution on the critical block (p, p+4):
    pull back, conjugate, push forward through the squared lowering map."""
    q = p + 4
    out = _out_like(u)
    for m in range(-q, p + 1):
        c = u.coeffs.get((p, q, m))
        if c is None:
            continue
        ratio = zbar2_scalar(p, q, m) / zbar2_scalar(p, q, -m - 4)
        cc = c.conj() if u.mode == "exact" else c.conjugate()
        _accum(out, (p, q, -m - 4), cc * _cast(ratio, u.mode))
    return out


def project(space, u):
    """L2-orthogonal projection onto the tagged deformation space."""
    if space in ("D0perp", "H1O"):
        return u.restrict(lambda p, q: q <= 1)
    if space == "D0":
        return u.restrict(lambda p, q: q >= 2)
    if space == "DBE":
        return u.restrict(lambda p, q: q >= p + 4)
    if space == "H2O":
        return real_part(u.restrict(lambda p, q: min(p, q) <= 1))
    if space == "Im_DO":
        return real_part(u.restrict(lambda p, q: p >= 2 and q >= 2))
    if space == "DBEprime":
        v = u.restrict(lambda p, q: q >= p + 4)
        crit = sorted({p for (p, q, _m) in v.coeffs if q == p + 4})
        for p in crit:
            blk = v.restrict(lambda pp, qq, p=p: (pp, qq) == (p, p + 4))
            sym = (blk + j_critical(blk, p)).scale(_half_of(u))
            v = v.restrict(lambda pp, qq, p=p: (pp, qq) != (p, p + 4)) + sym
        return v
    raise ValueError("unknown space tag %r" % (space,))


def membership(space, u, tol=None):
    """(is_member, residual): residual is ||u - project(space, u)||."""
    r = u - project(space, u)
    res = r.l2_norm()
    if u.mode == "exact":
        return r.is_zero(), res
    if tol is None:
        tol = 1e-12 * (1.0 + u.l2_norm())
    return res <= tol, res


# -- exact block inverse --------------------------------------------------------


def l_inverse(f, reality_tol=1e-9):
    """Right inverse of the linearized obstruction map on its image.

    f: real field supported in blocks p,q >= 2. Returns u supported in
    q >= p+4 blocks (reality-conditioned on the critical diagonal) with
    do_apply(u) = f. Components with P > Q are determined by the P < Q ones
    through reality and are checked, not consumed.
    """
    bad = [k for k, _ in f.coeffs.items() if min(k[0], k[1]) < 2]
    if bad:
        raise ValueError("block %r outside the image space" % (bad[0][:2],))
    d = f - real_part(f)
    if d.l2_norm() > reality_tol * (1.0 + f.l2_norm()):
        raise ValueError("input is not real (residual %.3e)" % d.l2_norm())
    out = _out_like(f)
    for (P, Q, mu), c in f.coeffs.items():
        if P > Q:
            continue
        lam = image_block_scalar(P, Q)
        beta = zbar2_scalar(P - 2, Q + 2, mu - 2)
        if f.mode == "exact":
            val = c / (QQi.of(lam) * beta)
        else:
            val = c / (float(lam) * beta.to_complex())
        _accum(out, (P - 2, Q + 2, mu - 2), val)
    return out


# -- bases for scans -------------------------------------------------------------


def d0perp_modes(pmax, degree=None):
    """(p,q,m) indices of the q <= 1 blocks with p <= pmax (and p+q <= degree)."""
    out = []
    for p in range(pmax + 1):
        for q in (0, 1):
            if degree is not None and p + q > degree:
                continue
            out.extend((p, q, m) for m in range(-q, p + 1))
    return out


def dbeprime_basis(degree):
    """Exact real-span basis of the reality-conditioned space, p+q <= degree.

    Overcritical blocks contribute e and i*e per mode; critical blocks the
    J-symmetrized combinations (dimension 2p+5 per block)."""
    out = []
    for p in range(degree + 1):
        for q in range(p + 4, degree - p + 1):
            n = p + q
            if q == p + 4:
                for m in range(-q, p + 1):
                    base = HarmonicField(n, {(p, q, m): QQi(1)})
                    if m == -2:
                        out.append(base)  # self-paired, already J-fixed
                    elif m > -2:
                        out.append((base + j_critical(base, p)))
                        ib = HarmonicField(n, {(p, q, m): QQi(0, 1)})
                        out.append((ib + j_critical(ib, p)))
            else:
                for m in range(-q, p + 1):
                    out.append(HarmonicField(n, {(p, q, m): QQi(1)}))
                    out.append(HarmonicField(n, {(p, q, m): QQi(0, 1)}))
    return out


def trivial_direction(f):
    """i * (twice-raised f) for a real field f: a trivial deformation."""
    i = QQi(0, 1) if f.mode == "exact" else 1j
    return z1_apply(z1_apply(f)).scale(i)


# -- bound scans ------------------------------------------------------------------


def _weight_sq(p, q):
    w = 1 + p + q + 2 * p * q
    return Fraction(w * w)


def bound_scan_eigenvalue_ratio(pmax, qmax, table="tabulated"):
    """Exact ratio scan of the q >= p+4 eigenvalue table against the squared
    sublaplacian weight; checks the 1/48 lower bound."""
    fn = dq_eigenvalue_be if table == "tabulated" else realified_eigenvalue
    lo = hi = None
    lo_at = hi_at = None
    violations = []
    bound = Fraction(1, 48)
    for p in range(pmax + 1):
        for q in range(p + 4, qmax + 1):
            r = fn(p, q) / _weight_sq(p, q)
            if lo is None or r < lo:
                lo, lo_at = r, (p, q)
            if hi is None or r > hi:
                hi, hi_at = r, (p, q)
            if r < bound:
                violations.append({"p": p, "q": q, "ratio": str(r)})
    return {
        "table": table,
        "pmax": pmax,
        "qmax": qmax,
        "bound": "1/48",
        "min_ratio": str(lo),
        "min_at": lo_at,
        "max_ratio": str(hi),
        "max_at": hi_at,
        "holds": not violations,
        "violations": violations[:10],
    }


def bound_scan_quartic_ratio(pmax, qmax):
    """Exact ratio scan of the quartic diagonal against the same weight."""
    lo = hi = None
    lo_at = hi_at = None
    violations = []
    for p in range(pmax + 1):
        for q in range(p + 4, qmax + 1):
            r = Fraction((p + 1) * (p + 2) * (q - 1) * q) / _weight_sq(p, q)
            if lo is None or r < lo:
                lo, lo_at = r, (p, q)
            if hi is None or r > hi:
                hi, hi_at = r, (p, q)
            if r <= 0:
                violations.append({"p": p, "q": q, "ratio": str(r)})
    return {
        "pmax": pmax,
        "qmax": qmax,
        "min_ratio": str(lo),
        "min_at": lo_at,
        "max_ratio": str(hi),
        "max_at": hi_at,
        "holds": not violations,
        "violations": violations[:10],
    }


# -- verification report builders ---------------------------------------------


def _pipeline_t1(v):
    from .deformed import DeformedStructure, JetRing

    ring = JetRing(1)
    st = DeformedStructure(ring.embed_field(v), ring)
    return to_harmonic(st.q11.coefficient(1), truncation=None)


def _restrict_block(u, p, q):
    return u.restrict(lambda pp, qq: (pp, qq) == (p, q))


def _scaled(v, scalar):
    return v.scale(QQi.of(scalar))


def spectra_rows(degree):
    """One row per tested basis vector: nonlinear pipeline t-coefficient vs
    operator composition (convention check) vs the tabulated constant."""
    rows = []

    def add_row(family, p, q, label, v, tab):
        pipe = _pipeline_t1(v)
        comp = dq_apply(v)
        n = max(pipe.truncation, comp.truncation, v.truncation)
        conv_ok = (_pad(pipe, n) - _pad(comp, n)).is_zero()
        real_scalar = (dq_diagonal(p, q) if family in ("q0", "q1")
                       else realified_eigenvalue(p, q))
        if family in ("q0", "q1"):
            tab_ok = (_pad(pipe, n) - _pad(_scaled(v, tab), n)).is_zero()
            real_ok = (_pad(pipe, n) - _pad(_scaled(v, real_scalar), n)).is_zero()
        else:
            got = _restrict_block(_pad(pipe, n), p, q)
            tab_ok = (got - _pad(_scaled(v, tab), n)).is_zero()
            real_ok = (got - _pad(_scaled(v, real_scalar), n)).is_zero()
        rows.append(
            {
                "family": family,
                "p": p,
                "q": q,
                "mode": label,
                "tabulated": str(tab),
                "realized": str(real_scalar),
                "pipeline_equals_composition": conv_ok,
                "matches_tabulated": tab_ok,
                "matches_realized": real_ok,
            }
        )

    for p in range(degree + 1):
        for q in (0, 1):
            if p + q > degree:
                continue
            tab = dq_eigenvalue_q01(p, q)
            for m in range(-q, p + 1):
                v = HarmonicField(p + q, {(p, q, m): QQi(1)})
                add_row("q%d" % q, p, q, "m=%d" % m, v, tab)

    for v in dbeprime_basis(degree):
        (p, q, _m) = next(iter(v.coeffs))
        fam = "critical" if q == p + 4 else "overcritical"
        tab = dq_eigenvalue_be(p, q)
        key = min(v.coeffs)
        add_row(fam, p, q, "m=%d" % key[2], v, tab)

    return rows


def _pad(u, n):
    return HarmonicField(n, dict(u.coeffs), mode=u.mode)


def kernel_report(degree):
    """Exact kernel checks: q <= 1 blocks, trivial directions, critical
    antisymmetric vectors."""
    checked = failures = 0

    for (p, q, m) in d0perp_modes(degree, degree):
        checked += 1
        if not do_apply(HarmonicField(p + q, {(p, q, m): QQi(1)})).is_zero():
            failures += 1

    triv_checked = triv_failures = 0
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            for m in range(-b, a + 1):
                base = HarmonicField(a + b, {(a, b, m): QQi(1)})
                for f in (real_part(base), real_part(base.scale(QQi(0, 1)))):
                    u = trivial_direction(f)
                    if u.is_zero():
                        continue
                    triv_checked += 1
                    if not do_apply(u).is_zero():
                        triv_failures += 1

    anti_checked = anti_failures = 0
    for p in range(degree - 3):
        q = p + 4
        if p + q > degree:
            break
        for m in range(-q, p + 1):
            if m == -2:
                continue
            base = HarmonicField(p + q, {(p, q, m): QQi(1)})
            anti = base - j_critical(base, p)
            if anti.is_zero():
                continue
            anti_checked += 1
            if not dq_apply(anti).is_zero():
                anti_failures += 1

    ok = failures == 0 and triv_failures == 0 and anti_failures == 0
    return {
        "degree": degree,
        "d0perp_vectors": checked,
        "d0perp_failures": failures,
        "trivial_directions": triv_checked,
        "trivial_failures": triv_failures,
        "critical_antisymmetric": anti_checked,
        "critical_antisymmetric_failures": anti_failures,
        "holds": ok,
    }


def image_report(degree):
    """Image checks: reality, block support p,q >= 2, expected pair support,
    full block coverage, and matching real dimension counts."""
    hit_blocks = set()
    reality_failures = []
    support_failures = []
    dim_domain = 0
    for v in dbeprime_basis(degree):
        (p, q, _m) = next(iter(v.coeffs))
        dim_domain += 1
        F = do_apply(v)
        if F.is_zero():
            support_failures.append({"p": p, "q": q, "why": "zero image"})
            continue
        if not (F - F.conj()).is_zero():
            reality_failures.append({"p": p, "q": q})
        pair = {(p + 2, q - 2), (q - 2, p + 2)}
        blocks = set(F.blocks())
        if not blocks <= pair:
            support_failures.append({"p": p, "q": q, "blocks": sorted(blocks)})
        if any(min(P, Q) < 2 for (P, Q) in blocks):
            support_failures.append({"p": p, "q": q, "why": "low block"})
        hit_blocks |= blocks
    want_blocks = {
        (P, Q)
        for P in range(2, degree - 1)
        for Q in range(2, degree + 1 - P)
    }
    missing = sorted(want_blocks - hit_blocks)
    dim_image = sum(
        2 * (P + Q + 1) if P < Q else (2 * P + 1)
        for (P, Q) in want_blocks
        if P <= Q
    )
    return {
        "degree": degree,
        "domain_real_dim": dim_domain,
        "image_real_dim": dim_image,
        "dims_match": dim_domain == dim_image,
        "blocks_missing": missing,
        "reality_failures": reality_failures,
        "support_failures": support_failures,
        "holds": not (missing or reality_failures or support_failures),
    }
