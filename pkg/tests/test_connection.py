"""Covariant, deformed and frame-split derivative operators at field level."""
import numpy as np
import pytest

from extensorfields.connection import DeformedStructure, ParallelismStructure, RelativeStructure
from extensorfields.fields import (
    Chart,
    ConstField,
    MvFromScalars,
    OperatorFromScalars,
    PolyField,
    VectorField,
    directional,
    mv_pair,
)
from extensorfields.randgen import (
    SuiteConfig,
    rand_gamma,
    rand_mv_field,
    rand_perturbed_operator,
    rand_vector_field,
    trial_rng,
)

CFG = SuiteConfig(dim=3, seed=12)


@pytest.fixture
def chart():
    return Chart(3)


def simple_gamma(chart):
    """G^k_ij = x^k for (i,j) = (0,1), zero otherwise; hand-checkable."""
    n = chart.n
    z = ConstField(chart, 0.0)
    gamma = [[[z for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for k in range(n):
        gamma[k][0][1] = PolyField.coordinate(chart, k)
    return ParallelismStructure(chart, gamma)


def test_basis_vector_derivative_matches_coefficients(chart):
    s = simple_gamma(chart)
    e0 = VectorField.basis(chart, 0)
    e1 = VectorField.basis(chart, 1)
    p = np.array([0.2, -0.4, 0.6])
    # nabla_{e0} e1 = x^k e_k; every other pair gives zero
    np.testing.assert_allclose(s.deriv_vector(e0, e1).vals(p), p)
    np.testing.assert_allclose(s.deriv_vector(e1, e0).vals(p), np.zeros(3))


def test_basis_form_derivative_has_opposite_sign(chart):
    s = simple_gamma(chart)
    e0 = VectorField.basis(chart, 0)
    p = np.array([0.2, -0.4, 0.6])
    for k in range(3):
        coeffs = [ConstField(chart, 0.0)] * chart.dim
        coeffs[1 << k] = ConstField(chart, 1.0)
        ek_form = MvFromScalars(chart, coeffs, dual=True)
        got = s.deriv(e0, ek_form).vals(p)
        # nabla_{e0} e^k = -G^k_0j e^j = -x^k e^1
        want = np.zeros(chart.dim)
        want[0b010] = -p[k]
        np.testing.assert_allclose(got, want, atol=1e-12)


def test_duality_leibniz_for_random_structure(chart):
    rng = trial_rng(CFG, "dcdo", 0)
    s = rand_gamma(rng, chart, CFG.degree)
    a = rand_vector_field(rng, chart, CFG.degree)
    x = rand_mv_field(rng, chart, CFG.degree, dual=False)
    phi = rand_mv_field(rng, chart, CFG.degree, dual=True)
    lhs = directional(a, mv_pair(phi, x))
    rhs = mv_pair(s.deriv(a, phi), x) + mv_pair(phi, s.deriv(a, x))
    for p in chart.sample(rng, 5):
        assert lhs.vals(p) == pytest.approx(rhs.vals(p), abs=1e-10)


def test_flat_structure_is_coefficient_derivative(chart):
    s = ParallelismStructure.flat(chart)
    rng = trial_rng(CFG, "dcdo", 1)
    x = rand_mv_field(rng, chart, CFG.degree, dual=False)
    a = rand_vector_field(rng, chart, CFG.degree)
    d = s.deriv(a, x)
    for p in chart.sample(rng, 3):
        np.testing.assert_allclose(d.vals(p), a.vals(p) @ x.grads(p), atol=1e-12)


def test_identity_deformation_coincides_with_base(chart):
    rng = trial_rng(CFG, "deform", 0)
    base = rand_gamma(rng, chart, CFG.degree)
    d = DeformedStructure(base, OperatorFromScalars.identity(chart))
    a = rand_vector_field(rng, chart, CFG.degree)
    for dual in (False, True):
        x = rand_mv_field(rng, chart, CFG.degree, dual=dual)
        lhs, rhs = d.deriv(a, x), base.deriv(a, x)
        for p in chart.sample(rng, 3):
            np.testing.assert_allclose(lhs.vals(p), rhs.vals(p), atol=1e-10)


def test_deformed_coefficient_structure_crosscheck(chart):
    rng = trial_rng(CFG, "deform", 1)
    d = DeformedStructure(rand_gamma(rng, chart, CFG.degree), rand_perturbed_operator(rng, chart))
    coeff = d.coefficient_structure()
    a = rand_vector_field(rng, chart, CFG.degree)
    x = rand_mv_field(rng, chart, CFG.degree, dual=False)
    lhs, rhs = d.deriv(a, x), coeff.deriv(a, x)
    for p in chart.sample(rng, 4):
        np.testing.assert_allclose(lhs.vals(p), rhs.vals(p), atol=1e-9)


def test_frame_legs_are_parallel(chart):
    rng = trial_rng(CFG, "split", 0)
    r = RelativeStructure(rand_gamma(rng, chart, CFG.degree), rand_perturbed_operator(rng, chart))
    a = rand_vector_field(rng, chart, CFG.degree)
    for j in range(chart.n):
        d = r.deriv_vector(a, r.frame_leg(j))
        for p in chart.sample(rng, 3):
            np.testing.assert_allclose(d.vals(p), np.zeros(chart.n), atol=1e-10)


def test_coordinate_frame_split_recovers_connection_term(chart):
    # with B = identity, nabla_a - partial_a on e_j is a^i G^k_ij e_k
    rng = trial_rng(CFG, "split", 1)
    base = rand_gamma(rng, chart, CFG.degree)
    r = RelativeStructure(base, OperatorFromScalars.identity(chart))
    a = rand_vector_field(rng, chart, CFG.degree)
    gam = r.connection_operator(a)
    want = base.gamma_operator(a)
    for p in chart.sample(rng, 3):
        np.testing.assert_allclose(gam.vals(p), want.vals(p), atol=1e-10)


def test_relative_connection_operator_is_tensorial(chart):
    # gamma_{fa} = f gamma_a: no derivative of the scaling survives
    rng = trial_rng(CFG, "split", 2)
    r = RelativeStructure(rand_gamma(rng, chart, CFG.degree), rand_perturbed_operator(rng, chart))
    a = rand_vector_field(rng, chart, CFG.degree)
    f = PolyField(chart, {(1, 1, 0): 2.0, (0, 0, 1): -1.0})
    lhs = r.connection_operator(a.scale(f))
    rhs = r.connection_operator(a)
    for p in chart.sample(rng, 3):
        np.testing.assert_allclose(lhs.vals(p), f.vals(p) * rhs.vals(p), atol=1e-9)


def test_scalar_derivative_is_structure_independent(chart):
    rng = trial_rng(CFG, "dcdo", 2)
    base = rand_gamma(rng, chart, CFG.degree)
    d = DeformedStructure(base, rand_perturbed_operator(rng, chart))
    a = rand_vector_field(rng, chart, CFG.degree)
    f = PolyField(chart, {(2, 1, 0): 1.0})
    for p in chart.sample(rng, 3):
        assert base.deriv_scalar(a, f).vals(p) == pytest.approx(d.deriv_scalar(a, f).vals(p))
