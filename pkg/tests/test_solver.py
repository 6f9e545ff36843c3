"""Fixed-point solver, Kuranishi map, second-order form, certificates."""

import random
from fractions import Fraction

import pytest

from crsphere import linear as L
from crsphere.harmonic import HarmonicField, unit_block_vector
from crsphere.scalars import QQi
from crsphere.solve import (
    SolveConfig,
    SolverDivergence,
    kuranishi,
    partial_solve,
    rigidity_certificate,
    rigidity_form_report,
    rigidity_quadratic_form,
    second_order_obstruction,
)

CFG = SolveConfig(truncation=6)


def _zero(n=6, mode="float"):
    return HarmonicField(n, None, mode=mode)


def test_config_validation():
    with pytest.raises(ValueError):
        SolveConfig(truncation=4)
    with pytest.raises(ValueError):
        SolveConfig(tol=0.0)
    with pytest.raises(ValueError):
        SolveConfig(backend="magic")
    with pytest.raises(ValueError):
        SolveConfig(order=1)
    assert SolveConfig(truncation=7).effective_work_degree() == 14


def test_zero_input_grid():
    rep = partial_solve(_zero(), CFG)
    assert rep.converged and rep.iterations == 1
    assert rep.psi.is_zero() and rep.kuranishi.is_zero()
    assert rep.residual_history == [0.0]


def test_zero_input_jet():
    rep = partial_solve(_zero(mode="exact"), SolveConfig(truncation=6, backend="jet"))
    assert rep.converged and rep.iterations == 1
    assert rep.psi.is_zero() and rep.kuranishi.is_zero()


def test_h20_example_quadratic_smallness():
    u = unit_block_vector(2, 0, 1)
    norms = []
    for eps in (1e-2, 5e-3, 2.5e-3):
        rep = partial_solve(u.scale(eps), CFG)
        assert rep.converged
        assert rep.residual_history[-1] <= 1e-12
        assert rep.psi_in_dbe
        ok, _ = L.membership("DBE", rep.psi)
        assert ok
        norms.append(rep.psi.l2_norm() / eps ** 2)
    base = norms[0]
    assert all(abs(n / base - 1.0) < 0.05 for n in norms)


def test_first_residual_scales_quadratically():
    u = unit_block_vector(3, 1, 0)
    r = []
    for eps in (2e-2, 1e-2, 5e-3):
        rep = partial_solve(u.scale(eps), CFG)
        r.append(rep.residual_history[0])
    assert r[0] / r[1] == pytest.approx(4.0, rel=0.15)
    assert r[1] / r[2] == pytest.approx(4.0, rel=0.15)


def test_uniqueness_across_initializations():
    u = unit_block_vector(2, 0, 0)
    phi0 = u.scale(1e-2)
    rng = random.Random(42)
    psis = []
    for trial in range(3):
        if trial == 0:
            f0 = None
        else:
            f = HarmonicField(6, None, mode="float")
            for (P, Q) in [(2, 2), (2, 3), (3, 2)]:
                for mu in range(-Q, P + 1):
                    f.coeffs[(P, Q, mu)] = (
                        complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) * 1e-5
                    )
            f0 = L.real_part(f)
        rep = partial_solve(phi0, CFG, f_init=f0)
        assert rep.converged
        psis.append(rep.psi)
    assert (psis[0] - psis[1]).l2_norm() <= 1e-10
    assert (psis[0] - psis[2]).l2_norm() <= 1e-10


def test_contraction_ratio_small_for_small_data():
    u = unit_block_vector(2, 1, -1)
    rep = partial_solve(u.scale(1e-2), CFG)
    assert rep.converged
    assert rep.contraction_ratio <= CFG.safety_factor


def test_jet_backend_exact_solve():
    phi0 = HarmonicField(6, {(2, 0, 1): QQi(Fraction(1, 8))})
    rep = partial_solve(phi0, SolveConfig(truncation=6, backend="jet", order=4))
    assert rep.converged
    assert rep.residual_history[-1] == 0.0
    orders = rep.extra["psi_orders"]
    assert orders[2].blocks() == [(0, 4)]
    assert all(orders[k].is_zero() for k in (0, 1, 3))
    kur2 = rep.extra["kuranishi_orders"][2]
    assert not kur2.is_zero()
    assert kur2.mode == "exact"


def test_jet_series_matches_grid_solution():
    phi0 = HarmonicField(6, {(2, 0, 1): QQi(Fraction(1, 8))})
    jet = partial_solve(phi0, SolveConfig(truncation=6, backend="jet", order=4))
    eps = 1e-2
    s = eps / phi0.l2_norm()
    grid = partial_solve(phi0.to_float().scale(s), CFG)
    acc = HarmonicField(6, None, mode="float")
    for k, pk in enumerate(jet.extra["psi_orders"]):
        if not pk.is_zero():
            acc = acc + pk.to_float().scale(s ** k)
    assert (acc - grid.psi).l2_norm() <= 1e-12


def test_divergence_detected_by_residual_growth():
    u = unit_block_vector(2, 0, 1)
    cfg = SolveConfig(truncation=6, scale_cap=3.0, max_iter=200)
    rep = partial_solve(u.scale(1.8), cfg)
    assert not rep.converged
    assert rep.iterations <= 20
    h = rep.residual_history
    assert all(h[i] > h[i - 1] for i in range(len(h) - 5, len(h)))


def test_divergence_via_inadmissible_iterate():
    u = unit_block_vector(2, 0, 1)
    cfg = SolveConfig(truncation=6, scale_cap=3.0, max_iter=200)
    rep = partial_solve(u.scale(1.95), cfg)
    assert not rep.converged
    assert rep.extra.get("aborted")


def test_rejections():
    u = unit_block_vector(2, 0, 1)
    with pytest.raises(ValueError):
        partial_solve(u.scale(0.5), CFG)  # scale cap
    bad = HarmonicField(6, {(0, 4, 0): QQi(1)})
    with pytest.raises(ValueError):
        partial_solve(bad, CFG)  # wrong sector


def test_kuranishi_wrapper():
    assert kuranishi(_zero(), CFG).is_zero()
    u = unit_block_vector(2, 0, 1)
    val = kuranishi(u.scale(1e-2), CFG)
    assert val.l2_norm() > 0
    assert val.is_real(tol=1e-12)
    cfg = SolveConfig(truncation=6, scale_cap=3.0, max_iter=200)
    with pytest.raises(SolverDivergence):
        kuranishi(u.scale(1.8), cfg)


def test_kuranishi_scales_quadratically():
    u = unit_block_vector(2, 0, 1)
    a = kuranishi(u.scale(1e-2), CFG).l2_norm()
    b = kuranishi(u.scale(5e-3), CFG).l2_norm()
    assert a / b == pytest.approx(4.0, rel=0.05)


# -- quadratic form ------------------------------------------------------


def test_rigidity_form_unit_values():
    # tabulated per-block constants against exact block norms
    e = HarmonicField(6, {(0, 0, 0): QQi(1)})
    val = rigidity_quadratic_form(e)
    want = e.block_norm_sq(0, 0).scale(QQi.of(48))
    assert (val + want.scale(QQi(-1))).is_zero()
    e1 = HarmonicField(6, {(0, 1, 0): QQi(1)})
    val = rigidity_quadratic_form(e1)
    want = e1.block_norm_sq(0, 1).scale(QQi.of(24))
    assert (val + want.scale(QQi(-1))).is_zero()


def test_rigidity_form_positive_on_basis():
    for p in range(0, 10):
        for q in (0, 1):
            if p + q > 10:
                continue
            e = HarmonicField(p + q, {(p, q, -q): QQi(1)})
            v = rigidity_quadratic_form(e)
            assert v.to_float() > 0


def test_rigidity_form_float_and_report():
    u = unit_block_vector(1, 1, 0).scale(0.25)
    v = rigidity_quadratic_form(u)
    assert v == pytest.approx((Fraction(16 * 13, 3)) * 0.0625, rel=1e-10)
    rep = rigidity_form_report(u)
    assert rep["value"] == pytest.approx(v)
    assert 0 < rep["ratio"]
    assert Fraction(rep["block_ratio_min"]) <= Fraction(rep["block_ratio_max"])


def test_rigidity_form_rejects_high_blocks():
    with pytest.raises(ValueError):
        rigidity_quadratic_form(HarmonicField(6, {(2, 2, 0): QQi(1)}))


# -- second-order expansion ------------------------------------------------


def test_second_order_zero():
    v = second_order_obstruction(HarmonicField(6, None))
    assert v.is_zero()


def test_second_order_constant_is_48():
    one = HarmonicField(6, {(0, 0, 0): QQi(1)})
    v = second_order_obstruction(one)
    want = one.block_norm_sq(0, 0).scale(QQi.of(48))
    assert (v + want.scale(QQi(-1))).is_zero()
    form = rigidity_quadratic_form(one)
    assert (v + form.scale(QQi(-1))).is_zero()


def test_second_order_matches_form_on_q0():
    u = HarmonicField(6, {(2, 0, 1): QQi(1, 2), (3, 0, 0): QQi(Fraction(1, 3))})
    v = second_order_obstruction(u)
    form = rigidity_quadratic_form(u)
    assert (v + form.scale(QQi(-1))).is_zero()


def test_second_order_q1_disagrees_with_tabulated_form():
    # realized t^2 coefficient on a (p,1) block is (1/3)(p+3)^2(p+4) per unit
    # norm; the tabulated form uses (1/3)(p+3)^2(5p+8); both are positive
    e1 = HarmonicField(6, {(0, 1, 0): QQi(1)})
    v = second_order_obstruction(e1)
    want_true = e1.block_norm_sq(0, 1).scale(QQi.of(12))
    assert (v + want_true.scale(QQi(-1))).is_zero()
    form = rigidity_quadratic_form(e1)
    assert not (v + form.scale(QQi(-1))).is_zero()
    assert v.to_float() > 0 and form.to_float() > 0


def test_second_order_independent_of_uddot():
    rng = random.Random(12)
    u = HarmonicField(6, {(1, 0, 0): QQi(1), (0, 1, -1): QQi(0, 1)})
    base = second_order_obstruction(u)
    for _ in range(3):
        udd = HarmonicField(
            6,
            {
                (0, 4, rng.randint(-4, 0)): QQi(rng.randint(-3, 3), rng.randint(-3, 3)),
                (1, 5, rng.randint(-5, 1)): QQi(rng.randint(-3, 3), rng.randint(-3, 3)),
            },
        )
        v = second_order_obstruction(u, uddot=udd)  # self-checks equality
        assert (v + base.scale(QQi(-1))).is_zero()


def test_second_order_positivity_vs_fs3():
    rng = random.Random(6)
    for _ in range(5):
        keys = {}
        for p in range(4):
            for q in (0, 1):
                m = rng.randint(-q, p)
                keys[(p, q, m)] = QQi(Fraction(rng.randint(-3, 3), 2),
                                      Fraction(rng.randint(-3, 3), 3))
        u = HarmonicField(6, keys)
        if u.is_zero():
            continue
        v = second_order_obstruction(u).to_float()
        assert v > 0
        assert v >= 1e-3 * u.fs_norm(3) ** 2


# -- certificates ------------------------------------------------------------


def test_certificate_zero():
    rep = rigidity_certificate(_zero(), CFG)
    assert rep["p_im_norm"] == 0.0
    assert rep["integral"] == pytest.approx(0.0, abs=1e-14)
    assert not rep["certified_nonflat"]


def test_certificate_quadratic_limit():
    u = unit_block_vector(2, 0, 1)
    vals = []
    for eps in (1e-2, 5e-3):
        rep = rigidity_certificate(u.scale(eps), CFG)
        vals.append(rep["integral"] / eps ** 2)
    form = rigidity_quadratic_form(u)
    assert vals[-1] == pytest.approx(form, rel=1e-3)
    assert abs(vals[1] - form) <= abs(vals[0] - form) + 1e-12


def test_certificate_on_solver_output():
    u = unit_block_vector(2, 0, 1)
    eps = 1e-2
    rep = partial_solve(u.scale(eps), CFG)
    assert rep.converged
    cert = rigidity_certificate(u.scale(eps) + rep.psi, CFG)
    assert cert["p_im_norm"] <= 10 * CFG.tol
    assert cert["integral"] > 10 * CFG.tol
    assert cert["certified_nonflat"]


def test_certificate_rejects_mixed_support():
    bad = HarmonicField(6, {(2, 2, 0): QQi(1)}).to_float()
    with pytest.raises(ValueError):
        rigidity_certificate(bad, CFG)
