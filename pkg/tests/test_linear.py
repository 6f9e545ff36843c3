"""Blockwise linear theory: eigenvalue tables, kernel/image structure,
the critical-block involution, and the exact block inverse."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crsphere import linear as L
from crsphere.harmonic import HarmonicField, zbar2_scalar
from crsphere.scalars import QQi


def _field(entries, n=None):
    if n is None:
        n = max(p + q for (p, q, _m) in entries)
    return HarmonicField(n, {k: QQi.of(v) for k, v in entries.items()})


def _rand_field(rng, keys, n=None):
    ent = {
        k: QQi(Fraction(rng.randint(-6, 6), 3), Fraction(rng.randint(-6, 6), 2))
        for k in keys
    }
    return _field(ent, n)


# -- eigenvalue tables -------------------------------------------------


TABULATED_CASES = [
    ("q01", 0, 0, Fraction(12)),
    ("q01", 1, 0, Fraction(20)),
    ("q01", 4, 0, Fraction(56)),
    ("q01", 0, 1, Fraction(8)),
    ("q01", 1, 1, Fraction(52, 3)),
    ("q01", 2, 1, Fraction(30)),
    ("be", 0, 4, Fraction(8)),
    ("be", 1, 5, Fraction(40)),
    ("be", 2, 6, Fraction(120)),
    ("be", 0, 5, Fraction(16, 3)),
    ("be", 0, 6, Fraction(8)),
    ("be", 1, 6, Fraction(24)),
]


@pytest.mark.parametrize("table,p,q,want", TABULATED_CASES)
def test_tabulated_rows(table, p, q, want):
    fn = L.dq_eigenvalue_q01 if table == "q01" else L.dq_eigenvalue_be
    assert fn(p, q) == want


REALIZED_CASES = [
    (0, 0, Fraction(12)),
    (0, 1, Fraction(4)),
    (1, 1, Fraction(20, 3)),
    (2, 1, Fraction(10)),
    (0, 4, Fraction(4)),
    (0, 5, Fraction(12)),
    (1, 5, Fraction(20)),
    (2, 2, Fraction(0)),
    (5, 3, Fraction(0)),
]


@pytest.mark.parametrize("p,q,want", REALIZED_CASES)
def test_realized_diagonal(p, q, want):
    assert L.dq_diagonal(p, q) == want


def test_diagonal_closed_forms():
    # q=0 agrees with the tabulated row; q in {2,3} is identically zero;
    # strictly overcritical factors as (1/6)(p+3)(p+4)(q-2)(q-3)
    for p in range(12):
        assert L.dq_diagonal(p, 0) == (p + 3) * (p + 4)
        assert L.dq_diagonal(p, 0) == L.dq_eigenvalue_q01(p, 0)
        assert L.dq_diagonal(p, 1) == Fraction((p + 3) * (p + 4), 3)
        assert L.dq_diagonal(p, 2) == 0
        assert L.dq_diagonal(p, 3) == 0
        for q in range(p + 5, p + 14):
            assert L.dq_diagonal(p, q) == Fraction(
                (p + 3) * (p + 4) * (q - 2) * (q - 3), 6
            )


def test_realified_critical_doubles_and_matches_tabulated():
    for p in range(8):
        q = p + 4
        lam = L.realified_eigenvalue(p, q)
        assert lam == 2 * L.dq_diagonal(p, q)
        assert lam == L.dq_eigenvalue_be(p, q)
        assert lam == Fraction((p + 1) * (p + 2) * (q - 1) * q, 3)


def test_q1_and_overcritical_tables_differ():
    # the q=1 and q>p+4 rows of the two tables disagree by the sign of the
    # mixed second-order term; both facts are pinned here on purpose
    assert L.dq_eigenvalue_q01(0, 1) == 8 and L.dq_diagonal(0, 1) == 4
    assert L.dq_eigenvalue_be(0, 5) == Fraction(16, 3)
    assert L.realified_eigenvalue(0, 5) == 12
    for p in range(4):
        for q in range(p + 5, p + 9):
            assert L.dq_eigenvalue_be(p, q) != L.realified_eigenvalue(p, q)


@pytest.mark.parametrize(
    "fn,args",
    [
        (L.dq_eigenvalue_be, (2, 5)),
        (L.dq_eigenvalue_be, (0, 3)),
        (L.dq_eigenvalue_q01, (1, 2)),
        (L.realified_eigenvalue, (3, 4)),
        (L.image_block_scalar, (1, 5)),
        (L.image_block_scalar, (4, 3)),
    ],
)
def test_out_of_range_rows_raise(fn, args):
    with pytest.raises(ValueError):
        fn(*args)


def test_reality_identity_exact():
    # Lam(p,q) * beta(p,q,m) == (1/6) * zeta4(q,p,-m) * beta(q-4,p+4,-m-4)
    sixth = QQi.of(Fraction(1, 6))
    for p in range(4):
        for q in range(p + 4, 11 - p):
            lam = QQi.of(L.dq_diagonal(p, q))
            for m in range(-q, p + 1):
                lhs = lam * zbar2_scalar(p, q, m)
                rhs = sixth * L._cross_chain(q, p, -m) * zbar2_scalar(
                    q - 4, p + 4, -m - 4
                )
                assert (lhs - rhs).is_zero(), (p, q, m)


# -- operator applications ---------------------------------------------


def test_dq_apply_single_block():
    u = _field({(1, 2, 0): 1})
    out = L.dq_apply(u)
    assert out.coeffs == {}  # diagonal vanishes on the q=2 strip

    u = _field({(2, 0, 1): Fraction(3, 2)})
    out = L.dq_apply(u)
    assert out.blocks() == [(2, 0)]
    assert (out.coeffs[(2, 0, 1)] - QQi.of(Fraction(45))).is_zero()  # 30*(3/2)


def test_dq_apply_cross_block():
    # q >= 4 couples antilinearly into (q-4, p+4)
    u = _field({(0, 4, -1): QQi(0, 1)})
    out = L.dq_apply(u)
    assert set(out.blocks()) == {(0, 4)}
    got = out.coeffs[(0, 4, -3)]
    lam = QQi.of(L.dq_diagonal(0, 4))
    ratio = zbar2_scalar(0, 4, -1) / zbar2_scalar(0, 4, -3)
    assert (got - QQi(0, -1) * lam * ratio).is_zero()
    assert (out.coeffs[(0, 4, -1)] - QQi(0, 1) * lam).is_zero()


def test_do_apply_kills_low_blocks():
    for (p, q, m) in L.d0perp_modes(6):
        u = _field({(p, q, m): 1}, p + q)
        assert L.do_apply(u).is_zero()


def test_trivial_directions_in_kernel():
    import random

    rng = random.Random(3)
    # mixed partner-pair case: real f spread over conjugate blocks with
    # both components surviving the double raise
    f = _rand_field(rng, [(3, 2, m) for m in range(-2, 4)], 8)
    f = f + _rand_field(rng, [(4, 4, m) for m in range(-4, 5)], 8)
    f = L.real_part(f)
    u = L.trivial_direction(f)
    assert not u.is_zero()
    assert len(u.blocks()) >= 3
    assert L.do_apply(u).is_zero()


def test_kernel_report():
    rep = L.kernel_report(7)
    assert rep["holds"]
    assert rep["d0perp_failures"] == 0
    assert rep["trivial_failures"] == 0
    assert rep["trivial_directions"] > 100


def test_resolvent_sublaplacian():
    u = _field({(2, 3, 1): 7, (0, 0, 0): 1})
    out = L.resolvent_sublaplacian(u)
    assert (out.coeffs[(2, 3, 1)] - QQi.of(Fraction(7, 18))).is_zero()
    assert (out.coeffs[(0, 0, 0)] - QQi(1)).is_zero()


# -- spaces and the critical involution --------------------------------


def test_j_critical_involution_properties():
    import random

    rng = random.Random(11)
    p, q = 2, 6
    u = _rand_field(rng, [(p, q, m) for m in range(-q, p + 1)], 8)
    ju = L.j_critical(u, p)
    assert (L.j_critical(ju, p) - u).is_zero()
    # antilinear: J(iu) = -i J(u)
    lhs = L.j_critical(u.scale(QQi(0, 1)), p)
    rhs = ju.scale(QQi(0, -1))
    assert (lhs - rhs).is_zero()


def test_dbeprime_projection_and_antisymmetric_complement():
    import random

    rng = random.Random(5)
    p, q = 1, 5
    u = _rand_field(rng, [(p, q, m) for m in range(-q, p + 1)], 6)
    pr = L.project("DBEprime", u)
    assert (L.project("DBEprime", pr) - pr).is_zero()
    anti = u - pr
    assert (L.j_critical(anti, p) + anti).is_zero()
    # antisymmetric part is exactly killed by the linearized tensor map
    assert L.dq_apply(anti).is_zero()


def test_space_projections_split():
    import random

    rng = random.Random(9)
    keys = [(0, 0, 0), (2, 1, 0), (1, 4, -2), (0, 5, -3), (3, 3, 1), (2, 6, 0)]
    u = _rand_field(rng, keys, 8)
    d0 = L.project("D0", u)
    d0p = L.project("D0perp", u)
    assert ((d0 + d0p) - u).is_zero()
    assert set(d0.blocks()) <= {(1, 4), (0, 5), (3, 3), (2, 6)}
    assert set(d0p.blocks()) <= {(0, 0), (2, 1)}
    ok, res = L.membership("D0", d0)
    assert ok and res == 0.0
    ok, _ = L.membership("D0perp", d0)
    assert not ok


def test_h2o_and_imdo_are_real_projections():
    u = _field({(2, 1, 0): QQi(0, 1), (3, 2, -1): QQi(1, 1)})
    h = L.project("H2O", u)
    assert h.is_real()
    assert set(h.blocks()) <= {(2, 1), (1, 2)}
    im = L.project("Im_DO", u)
    assert im.is_real()
    assert set(im.blocks()) <= {(3, 2), (2, 3)}


def test_unknown_space_rejected():
    with pytest.raises(ValueError):
        L.project("nope", _field({(0, 0, 0): 1}))


def test_dbeprime_basis_dimensions():
    basis = L.dbeprime_basis(8)
    assert len(basis) == 115
    per_block = {}
    for v in basis:
        (p, q) = v.blocks()[0]
        per_block[(p, q)] = per_block.get((p, q), 0) + 1
        ok, _ = L.membership("DBEprime", v)
        assert ok
    assert per_block[(0, 4)] == 5
    assert per_block[(1, 5)] == 7
    assert per_block[(2, 6)] == 9
    assert per_block[(0, 5)] == 12


# -- image and inverse ---------------------------------------------------


def test_image_report_dimensions_match():
    rep = L.image_report(8)
    assert rep["holds"]
    assert rep["domain_real_dim"] == 115
    assert rep["image_real_dim"] == 115
    assert rep["blocks_missing"] == []


def test_l_inverse_roundtrip_exact():
    import random

    rng = random.Random(17)
    keys = []
    for (P, Q) in [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2), (3, 3)]:
        keys.extend((P, Q, mu) for mu in range(-Q, P + 1))
    f = L.real_part(_rand_field(rng, keys, 7))
    u = L.l_inverse(f)
    ok, _ = L.membership("DBEprime", u)
    assert ok
    assert (L.do_apply(u) - f).is_zero()


def test_l_inverse_rejects_bad_input():
    with pytest.raises(ValueError):
        L.l_inverse(_field({(1, 2, 0): 1}))
    u = _field({(2, 2, 1): QQi(0, 1)})  # not real
    with pytest.raises(ValueError):
        L.l_inverse(u)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_l_inverse_roundtrip_random(seed):
    import random

    rng = random.Random(seed)
    keys = [
        (P, Q, mu)
        for P in range(2, 5)
        for Q in range(2, 7 - P + 1)
        for mu in range(-Q, P + 1)
        if rng.random() < 0.4
    ]
    if not keys:
        return
    f = L.real_part(_rand_field(rng, keys, 7))
    if f.is_zero():
        return
    u = L.l_inverse(f)
    assert (L.do_apply(u) - f).is_zero()
    ok, _ = L.membership("DBEprime", u)
    assert ok


# -- scans and reports ----------------------------------------------------


def test_bound_scan_eigenvalue_ratio_small():
    rep = L.bound_scan_eigenvalue_ratio(12, 30)
    assert rep["holds"]
    assert Fraction(rep["min_ratio"]) >= Fraction(1, 48)
    assert rep["violations"] == []


def test_bound_scan_quartic_ratio_small():
    rep = L.bound_scan_quartic_ratio(12, 30)
    assert rep["holds"]
    assert Fraction(rep["min_ratio"]) > 0


def test_spectra_rows_degree4():
    rows = L.spectra_rows(4)
    assert rows
    assert all(r["pipeline_equals_composition"] for r in rows)
    by_family = {}
    for r in rows:
        by_family.setdefault(r["family"], []).append(r["matches_tabulated"])
    assert all(by_family["q0"])
    assert all(by_family["critical"])
    assert not any(by_family["q1"])


# -- float mode ------------------------------------------------------------


def test_float_mode_tracks_exact():
    import random

    rng = random.Random(23)
    keys = [(2, 6, 0), (1, 5, -2), (0, 4, -1), (2, 1, 1)]
    u = _rand_field(rng, keys, 8)
    uf = u.to_float()
    for op in (L.dq_apply, L.do_apply, L.resolvent_sublaplacian):
        a, b = op(u).to_float(), op(uf)
        assert (a - b).l2_norm() <= 1e-9 * (1.0 + a.l2_norm())
    for tag in L.SPACE_TAGS:
        a, b = L.project(tag, u).to_float(), L.project(tag, uf)
        assert (a - b).l2_norm() <= 1e-9


def test_l_inverse_float_mode():
    f = L.real_part(_field({(2, 3, 1): QQi(1, 2), (2, 2, 0): 3}, 5)).to_float()
    u = L.l_inverse(f)
    assert (L.do_apply(u) - f).l2_norm() <= 1e-12
