"""Pointwise exterior/duality algebra against independent oracles."""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extensorfields import algebra as al
from extensorfields import blades


def mask_to_indices(mask):
    return [i for i in range(8) if mask >> i & 1]


def permutation_sign_oracle(idx_a, idx_b):
    """Sign of sorting the concatenation by counting inversions; the
    independent oracle for the wedge sign of disjoint blades."""
    seq = list(idx_a) + list(idx_b)
    inversions = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return -1 if inversions % 2 else 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_wedge_sign_matches_permutation_parity(n):
    for a in range(1 << n):
        for b in range(1 << n):
            got = blades.wedge_sign(a, b)
            if a & b:
                assert got == 0
            else:
                assert got == permutation_sign_oracle(mask_to_indices(a), mask_to_indices(b))


def test_wedge_hand_example():
    # (1 + e1) ^ (2 e2) = 2 e2 + 2 e12
    n = 2
    x = al.Multivector.scalar(n, 1.0) + al.Multivector.blade(n, 0b01)
    y = al.Multivector.blade(n, 0b10, 2.0)
    out = al.wedge(x, y)
    np.testing.assert_allclose(out.coeffs, [0.0, 0.0, 2.0, 2.0])


def test_wedge_side_mismatch_rejected():
    x = al.Multivector.blade(2, 0b01)
    phi = al.Multiform.blade(2, 0b10)
    with pytest.raises(TypeError):
        al.wedge(x, phi)


def test_duality_pair_determinant_example():
    # <(e^1 + e^2) ^ e^3, e1 ^ e3> = det [[1,0],[0,1]] picking the e13 cell
    n = 3
    phi = al.wedge(al.Multiform.blade(n, 0b001) + al.Multiform.blade(n, 0b010), al.Multiform.blade(n, 0b100))
    x = al.wedge(al.Multivector.blade(n, 0b001), al.Multivector.blade(n, 0b100))
    assert al.duality_pair(phi, x) == pytest.approx(1.0)


def test_duality_pair_is_blade_delta():
    n = 3
    for j in range(1 << n):
        for k in range(1 << n):
            got = al.duality_pair(al.Multiform.blade(n, j), al.Multivector.blade(n, k))
            assert got == pytest.approx(1.0 if j == k else 0.0)


def contraction_by_adjunction_oracle(phi, x, right=False):
    """Solve for the contraction from the defining adjunction, one basis
    form at a time; independent of the kernel's index bookkeeping."""
    n = phi.n
    out = np.zeros(1 << n)
    for mask in range(1 << n):
        psi = al.Multiform.blade(n, mask)
        if right:
            out[mask] = al.duality_pair(al.wedge(psi, phi), x)
        else:
            out[mask] = al.duality_pair(al.wedge(phi, psi), x)
    return out


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("right", [False, True])
def test_contractions_match_adjunction_oracle(n, right):
    rng = np.random.default_rng(7)
    for _ in range(20):
        phi = al.Multiform(n, rng.uniform(-1, 1, 1 << n))
        x = al.Multivector(n, rng.uniform(-1, 1, 1 << n))
        got = al.right_contract(phi, x) if right else al.left_contract(phi, x)
        np.testing.assert_allclose(got.coeffs, contraction_by_adjunction_oracle(phi, x, right), atol=1e-12)


def test_left_contract_hand_examples():
    n = 2
    e12 = al.Multivector.blade(n, 0b11)
    out = al.left_contract(al.Multiform.blade(n, 0b01), e12)
    np.testing.assert_allclose(out.coeffs, [0.0, 0.0, 1.0, 0.0])  # <e^1, e12| = e2
    out = al.right_contract(al.Multiform.blade(n, 0b10), e12)
    np.testing.assert_allclose(out.coeffs, [0.0, 1.0, 0.0, 0.0])  # |e^2, e12> = e1


def test_grade_project():
    n = 3
    x = al.Multivector(n, np.arange(8.0))
    p = al.grade_project(x, {1})
    expected = np.zeros(8)
    for mask in (0b001, 0b010, 0b100):
        expected[mask] = x.coeffs[mask]
    np.testing.assert_allclose(p.coeffs, expected)


@pytest.mark.parametrize("n", [2, 3])
def test_outermorphism_scaling_on_top_grade(n):
    # lambda = 2I multiplies the top blade by 2^n (its determinant)
    lam = al.VectorOperator(2.0 * np.eye(n))
    ext = al.outermorphism_extend(lam)
    top = al.Multivector.blade(n, (1 << n) - 1)
    np.testing.assert_allclose(ext(top).coeffs[(1 << n) - 1], 2.0**n)


def test_outermorphism_columns_are_wedges_of_images():
    n = 3
    rng = np.random.default_rng(3)
    lam = al.VectorOperator(rng.uniform(-1, 1, (n, n)))
    ext = al.outermorphism_extend(lam)
    for mask in range(1 << n):
        acc = al.Multivector.scalar(n, 1.0)
        for i in mask_to_indices(mask):
            acc = al.wedge(acc, ext(al.Multivector.blade(n, 1 << i)))
        np.testing.assert_allclose(ext(al.Multivector.blade(n, mask)).coeffs, acc.coeffs, atol=1e-12)


def test_derivation_extension_of_identity_is_grade_operator():
    n = 3
    ext = al.derivation_extend(al.VectorOperator(np.eye(n)))
    diag = np.diag([blades.grade(m) for m in range(1 << n)]).astype(float)
    np.testing.assert_allclose(ext.matrix, diag)


def test_duality_adjoint_transpose_and_involution():
    n = 3
    rng = np.random.default_rng(11)
    ext = al.outermorphism_extend(al.VectorOperator(rng.uniform(-1, 1, (n, n))))
    adj = al.duality_adjoint(ext)
    assert adj.on_forms and not ext.on_forms
    np.testing.assert_allclose(adj.matrix, ext.matrix.T)
    np.testing.assert_allclose(al.duality_adjoint(adj).matrix, ext.matrix)


def test_vector_operator_inverse_guard():
    with pytest.raises(np.linalg.LinAlgError):
        al.VectorOperator(np.zeros((2, 2))).inverse()


coeff_lists = st.lists(st.floats(-10, 10, allow_nan=False), min_size=8, max_size=8)


@settings(max_examples=60, deadline=None)
@given(coeff_lists, coeff_lists, coeff_lists)
def test_wedge_associative_property(a, b, c):
    n = 3
    A, B, C = (al.Multivector(n, v) for v in (a, b, c))
    lhs = al.wedge(al.wedge(A, B), C)
    rhs = al.wedge(A, al.wedge(B, C))
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-8)


@settings(max_examples=60, deadline=None)
@given(coeff_lists, coeff_lists, coeff_lists)
def test_wedge_distributive_property(a, b, c):
    n = 3
    A, B, C = (al.Multivector(n, v) for v in (a, b, c))
    lhs = al.wedge(A + B, C)
    rhs = al.wedge(A, C) + al.wedge(B, C)
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-8)


@settings(max_examples=60, deadline=None)
@given(coeff_lists, coeff_lists)
def test_adjoint_pairing_property(phi, x):
    n = 3
    rng = np.random.default_rng(5)
    ext = al.outermorphism_extend(al.VectorOperator(rng.uniform(-1, 1, (n, n))))
    adj = al.duality_adjoint(ext)
    P, X = al.Multiform(n, phi), al.Multivector(n, x)
    assert al.duality_pair(adj(P), X) == pytest.approx(al.duality_pair(P, ext(X)), abs=1e-7)
