"""Formal jet ring: exactness oracles."""

from fractions import Fraction

import pytest

from crsphere.jets import JetSeries
from crsphere.polyfn import ONE, PolyFn, W, WB, Z, ZB
from crsphere.scalars import QQi


def test_padding_and_overflow():
    u = JetSeries.of_polyfn(Z, 3, power=1)
    assert u.coefficient(0).is_zero()
    assert u.coefficient(1) == Z
    assert JetSeries.of_polyfn(Z, 2, power=5).is_zero()


def test_product_telescopes():
    u = JetSeries.of_polyfn(Z * WB, 4, power=1)
    one = JetSeries.one(4)
    prod = (one + u) * (one - u)
    want = one - u * u
    assert prod == want


def test_inverse_of_metric_factor():
    phi = JetSeries.of_polyfn(Z * WB, 6, power=1)
    h = JetSeries.one(6) - phi * phi.conj()
    hi = h.inverse()
    assert (h * hi) == JetSeries.one(6)


def test_inverse_geometric_series():
    c = PolyFn.const(QQi(Fraction(1, 2)))
    g = (JetSeries.one(5) - JetSeries.of_polyfn(c, 5, power=1)).inverse()
    for k in range(6):
        assert g.coefficient(k) == PolyFn.const(QQi(Fraction(1, 2) ** k))


def test_inverse_requires_constant_unit():
    with pytest.raises(ValueError):
        JetSeries.of_polyfn(Z, 3, power=0).inverse()
    with pytest.raises(ValueError):
        JetSeries.zero(3).inverse()


def test_derivations_commute_with_grading():
    u = JetSeries.of_polyfn(Z * Z * WB, 3, power=2)
    assert u.z1().coefficient(2) == (Z * Z * WB).z1()
    assert u.conj().coefficient(2) == (Z * Z * WB).conj()
    assert u.t_op().coefficient(2) == (Z * Z * WB).t_op()


def test_evaluate_and_integrate():
    u = JetSeries.one(2) + JetSeries.of_polyfn(Z * ZB, 2, power=1)
    at = u.evaluate(Fraction(1, 3))
    assert at == ONE + (Z * ZB).smul(QQi(Fraction(1, 3)))
    ints = u.integrate()
    assert ints[0].to_float() == pytest.approx(4 * 3.14159265358979**2, rel=1e-6)
    assert ints[1].coef == QQi(2)


def test_order_mismatch_rejected():
    with pytest.raises(ValueError):
        JetSeries.one(2) + JetSeries.one(3)
