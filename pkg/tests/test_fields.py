"""Smooth-field layer: exact jets, pointwise lifts, chart checks."""
import numpy as np
import pytest

from extensorfields import algebra as al
from extensorfields.fields import (
    Chart,
    ConstField,
    CoordDeriv,
    MvFromScalars,
    OperatorFromScalars,
    PolyField,
    VectorField,
    directional,
    lift_pointwise,
    mv_constant,
    mv_pair,
    mv_scale,
    mv_wedge,
)

FD_H = 1e-5


def fd_gradient(f, p, h=FD_H):
    n = len(p)
    cols = []
    for k in range(n):
        dp = np.zeros(n)
        dp[k] = h
        cols.append((np.asarray(f.vals(p + dp)) - np.asarray(f.vals(p - dp))) / (2 * h))
    return np.stack(cols)


def test_poly_value_and_gradient_hand_example():
    chart = Chart(2)
    # f = x^2 y + 3 y
    f = PolyField(chart, {(2, 1): 1.0, (0, 1): 3.0})
    p = np.array([0.5, -0.25])
    assert f.value(p) == pytest.approx(0.25 * -0.25 + 3 * -0.25)
    np.testing.assert_allclose(f.gradient(p), [2 * 0.5 * -0.25, 0.25 + 3.0])


def test_poly_rejects_bad_exponents():
    chart = Chart(2)
    with pytest.raises(ValueError):
        PolyField(chart, {(1, -1): 1.0})
    with pytest.raises(ValueError):
        PolyField(chart, {(1, 0, 0): 1.0})


def test_chart_guards():
    chart = Chart(2)
    with pytest.raises(ValueError):
        chart.require([2.0, 0.0])
    with pytest.raises(ValueError):
        chart.require([0.0])
    f = PolyField(chart, {(1, 0): 1.0})
    with pytest.raises(ValueError):
        f.value([5.0, 0.0])


def test_directional_derivative_value():
    chart = Chart(2)
    f = PolyField(chart, {(1, 1): 1.0})  # x y
    a = VectorField.basis(chart, 0)
    p = np.array([0.3, 0.5])
    assert directional(a, f).value(p) == pytest.approx(0.5)


def test_coordinate_field_times_basis_vector():
    # x^1 e2 evaluated at (3, 5) gives 3 e2
    chart = Chart(2, lo=-10.0, hi=10.0)
    coeffs = [ConstField(chart, 0.0)] * 4
    coeffs[0b10] = PolyField.coordinate(chart, 0)
    f = MvFromScalars(chart, coeffs, dual=False)
    np.testing.assert_allclose(f.value([3.0, 5.0]).coeffs, [0.0, 0.0, 3.0, 0.0])


@pytest.mark.parametrize("op", ["wedge", "left_contract", "right_contract"])
def test_lift_pointwise_matches_pointwise_algebra(op):
    chart = Chart(3)
    rng = np.random.default_rng(2)
    xs = [PolyField(chart, {tuple(rng.integers(0, 2, 3)): float(rng.integers(-3, 4))}) for _ in range(8)]
    ys = [PolyField(chart, {tuple(rng.integers(0, 2, 3)): float(rng.integers(-3, 4))}) for _ in range(8)]
    a_dual = op != "wedge"
    fa = MvFromScalars(chart, xs, dual=a_dual)
    fb = MvFromScalars(chart, ys, dual=False)
    lifted = lift_pointwise(op, fa, fb)
    fn = getattr(al, op)
    for p in chart.sample(rng, 4):
        got = lifted.value(p)
        want = fn(fa.value(p), fb.value(p))
        np.testing.assert_allclose(got.coeffs, want.coeffs, atol=1e-12)


def test_pair_field_is_scalar_linear():
    chart = Chart(2)
    rng = np.random.default_rng(4)
    phi = MvFromScalars(chart, [PolyField(chart, {(1, 0): 1.0})] * 4, dual=True)
    x = MvFromScalars(chart, [PolyField(chart, {(0, 1): 1.0})] * 4, dual=False)
    g = PolyField(chart, {(1, 1): 2.0})
    lhs = mv_pair(phi, mv_scale(g, x))
    rhs = g * mv_pair(phi, x)
    for p in chart.sample(rng, 5):
        assert lhs.value(p) == pytest.approx(rhs.value(p))


def test_wedge_field_gradient_is_exact():
    chart = Chart(3)
    rng = np.random.default_rng(6)
    fa = MvFromScalars(chart, [PolyField(chart, {(1, 0, 0): 1.0, (0, 2, 0): -2.0})] * 8, dual=False)
    fb = MvFromScalars(chart, [PolyField(chart, {(0, 1, 1): 3.0})] * 8, dual=False)
    w = mv_wedge(fa, fb)
    for p in chart.sample(rng, 3):
        np.testing.assert_allclose(w.grads(p), fd_gradient(w, p), atol=1e-6)


def test_coord_deriv_value_from_jets():
    chart = Chart(2)
    f = MvFromScalars(chart, [PolyField(chart, {(2, 0): 1.0})] * 4, dual=False)
    a = VectorField.constant(chart, [2.0, 0.0])
    d = CoordDeriv(a, f)
    p = np.array([0.4, 0.1])
    np.testing.assert_allclose(d.vals(p), np.full(4, 2.0 * 2 * 0.4))


def test_operator_inverse_field_jet():
    chart = Chart(2)
    # A = [[1, x], [0, 1]], A^-1 = [[1, -x], [0, 1]]
    entries = [
        [ConstField(chart, 1.0), PolyField.coordinate(chart, 0)],
        [ConstField(chart, 0.0), ConstField(chart, 1.0)],
    ]
    op = OperatorFromScalars(chart, entries)
    inv = op.inverse()
    p = np.array([0.7, 0.2])
    np.testing.assert_allclose(inv.vals(p), [[1.0, -0.7], [0.0, 1.0]], atol=1e-12)
    np.testing.assert_allclose(inv.grads(p), fd_gradient(inv, p), atol=1e-6)
    assert inv.inverse() is op


def test_outer_extension_field_jet():
    chart = Chart(2)
    entries = [
        [ConstField(chart, 1.0), PolyField.coordinate(chart, 1)],
        [PolyField.coordinate(chart, 0), ConstField(chart, 1.0)],
    ]
    ext = OperatorFromScalars(chart, entries).outer_extension()
    rng = np.random.default_rng(8)
    for p in chart.sample(rng, 3):
        np.testing.assert_allclose(ext.grads(p), fd_gradient(ext, p), atol=1e-6)


def test_extension_apply_side_guard():
    chart = Chart(2)
    ext = OperatorFromScalars.identity(chart).outer_extension()
    x = mv_constant(chart, al.Multivector.blade(2, 0b01))
    phi = mv_constant(chart, al.Multiform.blade(2, 0b01))
    ext.apply(x)
    ext.apply(phi, adjoint=True)
    with pytest.raises(TypeError):
        ext.apply(x, adjoint=True)
    with pytest.raises(TypeError):
        ext.apply(phi)


def test_chart_mismatch_rejected():
    a = VectorField.basis(Chart(2), 0)
    f = MvFromScalars(Chart(2, lo=-2.0, hi=2.0), [ConstField(Chart(2, lo=-2.0, hi=2.0), 1.0)] * 4, dual=False)
    with pytest.raises(ValueError):
        CoordDeriv(a, f)
