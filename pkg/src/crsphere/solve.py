"""Fixed-point partial solver, Kuranishi map, and rigidity certificates.

The solver seeks psi supported in the q >= p+4 blocks so that the full
nonlinear obstruction of psi + phi0 has no component in the image of the
linearized obstruction map. The iteration is

    T(f) = f - P_Im O(Linv f + phi0),        psi = Linv f*,

with Linv the exact block inverse from linear_theory, frozen at the round
structure. Two backends: "grid" iterates on floating fields and measures
L2 residuals; "jet" iterates order by order on the formal ray t*phi0 and
converges to an exactly zero residual after finitely many sweeps.

Whatever remains of the obstruction after the solve lies in the low
sector (min(p,q) <= 1 real blocks): that remainder is the Kuranishi value,
and its nonvanishing is what the rigidity certificate reports.
"""

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .deformed import DeformedStructure, GridRing, JetRing
from .harmonic import HarmonicField, to_harmonic
from .hopf import coef_to_harmonic
from .linear import (
    do_apply,
    l_inverse,
    membership,
    project,
    resolvent_sublaplacian,
    z1_apply,
)
from .scalars import Pi2Multiple, QQi

DIVERGENCE_WINDOW = 5  # consecutive residual increases before giving up


@dataclass
class SolveConfig:
    truncation: int = 8
    backend: str = "grid"
    tol: float = 1e-12
    max_iter: int = 200
    safety_factor: float = 0.9
    scale_cap: float = 0.35
    order: int = 4
    work_degree: int = 0  # 0 = derive from truncation

    def __post_init__(self):
        if self.truncation < 6:
            raise ValueError("truncation must be >= 6, got %d" % self.truncation)
        if self.backend not in ("grid", "jet"):
            raise ValueError("backend must be 'grid' or 'jet'")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.order < 2:
            raise ValueError("jet order must be >= 2")

    def effective_work_degree(self):
        if self.work_degree:
            return self.work_degree
        return max(2 * self.truncation, self.truncation + 4)


@dataclass
class SolveReport:
    converged: bool
    iterations: int
    residual_history: list
    psi: HarmonicField
    kuranishi: HarmonicField
    contraction_ratio: float
    backend: str
    psi_in_dbe: bool
    extra: dict = dc_field(default_factory=dict)


class SolverDivergence(RuntimeError):
    def __init__(self, report):
        super().__init__("solver did not converge after %d iterations"
                         % report.iterations)
        self.report = report


def _check_phi0(phi0, cfg):
    ok, res = membership("D0perp", phi0)
    if not ok and res > 1e-10 * (1.0 + phi0.l2_norm()):
        raise ValueError("phi0 must lie in the q <= 1 sector "
                         "(residual %.3e)" % res)
    scale = phi0.l2_norm()
    if scale > cfg.scale_cap:
        raise ValueError("deformation scale %.3e exceeds cap %.3e"
                         % (scale, cfg.scale_cap))


def _contraction_ratio(history):
    ratios = [
        history[i] / history[i - 1]
        for i in range(1, len(history))
        if history[i - 1] > 0
    ]
    return max(ratios) if ratios else 0.0


def _solve_grid(phi0, cfg, f_init):
    n = cfg.truncation
    phi0f = phi0.to_float() if phi0.mode == "exact" else phi0
    phi0f = phi0f.truncate(n)
    ring = GridRing(cfg.effective_work_degree())
    f = f_init.to_float() if f_init is not None and f_init.mode == "exact" else f_init
    if f is None:
        f = HarmonicField(n, None, mode="float")
    history = []
    increases = 0
    psi = HarmonicField(n, None, mode="float")
    obs_field = psi
    converged = False
    it = 0
    aborted = None
    while it < cfg.max_iter:
        it += 1
        psi = l_inverse(f)
        total = phi0f + psi
        try:
            st = DeformedStructure(ring.embed_field(total), ring)
        except ValueError:
            if it == 1:
                raise  # phi0 itself is inadmissible: bad input
            aborted = "iterate left the admissible region"
            break
        obs_field = coef_to_harmonic(st.obstruction.truncate(n), n)
        g = project("Im_DO", obs_field)
        res = g.l2_norm()
        history.append(res)
        if res <= cfg.tol:
            converged = True
            break
        if len(history) >= 2 and res > history[-2]:
            increases += 1
            if increases >= DIVERGENCE_WINDOW:
                break
        else:
            increases = 0
        f = f - g
    kur = project("H2O", obs_field)
    ok_dbe, _ = membership("DBE", psi)
    extra = {"work_degree": ring.work_degree, "truncation": n}
    if aborted:
        extra["aborted"] = aborted
    return SolveReport(
        converged=converged,
        iterations=it,
        residual_history=history,
        psi=psi,
        kuranishi=kur,
        contraction_ratio=_contraction_ratio(history),
        backend="grid",
        psi_in_dbe=ok_dbe,
        extra=extra,
    )


def _solve_jet(phi0, cfg, f_init):
    if phi0.mode != "exact":
        raise ValueError("jet backend needs an exact-mode phi0")
    n = cfg.truncation
    K = cfg.order
    ring = JetRing(K)
    zero = HarmonicField(n, None)
    f_orders = [zero] * (K + 1)
    if f_init is not None:
        f_orders = list(f_init) + [zero] * (K + 1 - len(f_init))
    history = []
    converged = False
    it = 0
    psi_orders = [zero] * (K + 1)
    obs_orders = [zero] * (K + 1)
    while it < min(cfg.max_iter, K + 3):
        it += 1
        psi_orders = [l_inverse(fk) for fk in f_orders]
        phi = ring.embed_field(phi0.truncate(n), 1)
        for k in range(2, K + 1):
            if not psi_orders[k].is_zero():
                phi = phi + ring.embed_field(psi_orders[k], k)
        st = DeformedStructure(phi, ring)
        obs_orders = [
            to_harmonic(st.obstruction.coefficient(k), truncation=n)
            for k in range(K + 1)
        ]
        g_orders = [project("Im_DO", ok) for ok in obs_orders]
        res = math.sqrt(sum(g.l2_norm() ** 2 for g in g_orders))
        history.append(res)
        if all(g.is_zero() for g in g_orders):
            converged = True
            break
        f_orders = [fk - gk for fk, gk in zip(f_orders, g_orders)]
    psi = zero
    for pk in psi_orders:
        psi = psi + pk
    kur_orders = [project("H2O", ok) for ok in obs_orders]
    kur = zero
    for kk in kur_orders:
        kur = kur + kk
    ok_dbe, _ = membership("DBE", psi)
    return SolveReport(
        converged=converged,
        iterations=it,
        residual_history=history,
        psi=psi,
        kuranishi=kur,
        contraction_ratio=_contraction_ratio(history),
        backend="jet",
        psi_in_dbe=ok_dbe,
        extra={
            "order": K,
            "truncation": n,
            "psi_orders": psi_orders,
            "kuranishi_orders": kur_orders,
        },
    )


def partial_solve(phi0, cfg=None, f_init=None):
    """Iterate T to the partial solution psi; see the module docstring."""
    cfg = cfg or SolveConfig()
    _check_phi0(phi0, cfg)
    if cfg.backend == "jet":
        return _solve_jet(phi0, cfg, f_init)
    return _solve_grid(phi0, cfg, f_init)


def kuranishi(phi0, cfg=None):
    """Low-sector obstruction of the partial solution; raises on divergence."""
    rep = partial_solve(phi0, cfg)
    if not rep.converged:
        raise SolverDivergence(rep)
    return rep.kuranishi


# -- second-order rigidity ----------------------------------------------------


def rigidity_coefficient(p, q):
    """Tabulated per-block coefficient of the second-order quadratic form."""
    if q == 0:
        return Fraction((p + 4) * (p + 4) * (p + 3))
    if q == 1:
        return Fraction((p + 3) * (p + 3) * (5 * p + 8), 3)
    raise ValueError("quadratic form rows cover q in {0,1}, got q=%d" % q)


def rigidity_quadratic_form(u):
    """Tabulated blockwise quadratic form on the q <= 1 sector.

    Exact input gives an exact multiple of pi^2; float input a float."""
    ok, res = membership("D0perp", u)
    if not (ok or res <= 1e-10 * (1.0 + u.l2_norm())):
        raise ValueError("quadratic form needs q <= 1 support (residual %.3e)" % res)
    if u.mode == "exact":
        acc = Pi2Multiple(QQi(0))
        for (p, q) in u.blocks():
            acc = acc + u.block_norm_sq(p, q).scale(QQi.of(rigidity_coefficient(p, q)))
        return acc
    return sum(
        float(rigidity_coefficient(p, q)) * u.block_norm_sq(p, q)
        for (p, q) in u.blocks()
    )


def rigidity_form_report(u):
    """Value plus two-sided comparability against fs_norm(u, 3)^2."""
    val = rigidity_quadratic_form(u)
    vf = val.to_float() if isinstance(val, Pi2Multiple) else float(val)
    fs_sq = u.fs_norm(3) ** 2
    block_ratios = {}
    for (p, q) in u.blocks():
        w = (1 + p + q + 2 * p * q) ** 3
        block_ratios["(%d,%d)" % (p, q)] = str(rigidity_coefficient(p, q) / w)
    ratios = [Fraction(r) for r in block_ratios.values()]
    return {
        "value": vf,
        "fs3_sq": fs_sq,
        "ratio": vf / fs_sq if fs_sq > 0 else 0.0,
        "block_ratio_min": str(min(ratios)) if ratios else None,
        "block_ratio_max": str(max(ratios)) if ratios else None,
        "block_ratios": block_ratios,
    }


def second_order_obstruction(u, uddot=None):
    """Exact t^2 coefficient of the obstruction integral along
    phi(t) = t*u + (t^2/2)*uddot, computed through the nonlinear jet
    pipeline. The value is independent of uddot; this is checked when a
    nonzero uddot is supplied."""
    if u.mode != "exact":
        raise ValueError("second-order expansion needs an exact-mode field")
    ok, res = membership("D0perp", u)
    if not ok:
        raise ValueError("second-order expansion needs q <= 1 support "
                         "(residual %.3e)" % res)
    ring = JetRing(2)
    phi = ring.embed_field(u, 1)
    base = DeformedStructure(phi, ring).obstruction_integral()[2]
    if uddot is not None and not uddot.is_zero():
        if uddot.mode != "exact":
            raise ValueError("uddot must be exact-mode")
        half = QQi(Fraction(1, 2))
        phi2 = phi + ring.embed_field(uddot.scale(half), 2)
        with_u2 = DeformedStructure(phi2, ring).obstruction_integral()[2]
        diff = with_u2 + base.scale(QQi(-1))
        if not diff.is_zero():
            raise RuntimeError(
                "second-order coefficient depended on the second derivative "
                "(difference %r)" % diff
            )
    return base


# -- certificates ---------------------------------------------------------------


def rigidity_certificate(phi, cfg=None):
    """Numerical non-flatness certificate for a small deformation tensor.

    Reports the L2 size of the image-sector obstruction, the obstruction
    integral, and the diagnostic decomposition used in the pairing argument.
    """
    cfg = cfg or SolveConfig()
    n = cfg.truncation
    decomp = phi - project("DBEprime", phi) - project("D0perp", phi)
    if decomp.l2_norm() > 1e-10 * (1.0 + phi.l2_norm()):
        raise ValueError(
            "phi must split into reality-conditioned q >= p+4 blocks plus "
            "the q <= 1 sector (residual %.3e)" % decomp.l2_norm()
        )
    phif = (phi.to_float() if phi.mode == "exact" else phi).truncate(n)
    ring = GridRing(cfg.effective_work_degree())
    st = DeformedStructure(ring.embed_field(phif), ring)
    obs_field = coef_to_harmonic(st.obstruction.truncate(n), n)
    a = project("Im_DO", obs_field).l2_norm()
    integral = st.obstruction_integral()
    b = integral.real
    eps = phif.fs_norm(3)
    be_part = project("DBE", phif)
    ratio = (be_part.fs_norm(3) / eps) if eps > 0 else 0.0
    remainder = obs_field - do_apply(phif)
    pair_field = resolvent_sublaplacian(z1_apply(z1_apply(remainder)))
    pairing = pair_field.inner(be_part)
    return {
        "p_im_norm": a,
        "integral": b,
        "integral_imag": integral.imag,
        "eps_fs3": eps,
        "be_ratio": ratio,
        "pairing_re": pairing.real,
        "pairing_im": pairing.imag,
        "certified_nonflat": bool(a > cfg.tol or abs(b) > cfg.tol),
        "tol": cfg.tol,
        "truncation": n,
    }
