"""Pointwise exterior/duality algebra: multivectors, multiforms and the
three operator constructions (outermorphism extension, duality adjoint,
derivation extension).

No metric appears anywhere: the only products are the exterior product and
the duality pairing between the algebra and its dual, with blade
orthonormality <e^J, e_K> = delta_JK.
"""
from __future__ import annotations

import numpy as np

from . import blades

EPS_INVERTIBLE = 1e-8


class GradedElement:
    """Dense element of the exterior algebra (2^n coefficients by blade mask)."""

    dual: bool  # False: element of /\V, True: element of /\V*

    def __init__(self, n: int, coeffs=None):
        blades.check_dim(n)
        self.n = n
        if coeffs is None:
            self.coeffs = np.zeros(1 << n)
        else:
            self.coeffs = np.asarray(coeffs, dtype=float).copy()
            if self.coeffs.shape != (1 << n,):
                raise ValueError(f"expected {1 << n} coefficients, got {self.coeffs.shape}")

    @classmethod
    def zero(cls, n: int):
        return cls(n)

    @classmethod
    def scalar(cls, n: int, value: float):
        c = np.zeros(1 << n)
        c[0] = value
        return cls(n, c)

    @classmethod
    def blade(cls, n: int, mask: int, coeff: float = 1.0):
        c = np.zeros(1 << n)
        c[mask] = coeff
        return cls(n, c)

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        n = v.shape[0]
        c = np.zeros(1 << n)
        c[1 << np.arange(n)] = v
        return cls(n, c)

    def grades(self) -> set[int]:
        return {blades.grade(m) for m in np.nonzero(self.coeffs)[0]}

    def __add__(self, other):
        self._check_same(other)
        return type(self)(self.n, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_same(other)
        return type(self)(self.n, self.coeffs - other.coeffs)

    def __neg__(self):
        return type(self)(self.n, -self.coeffs)

    def __rmul__(self, scalar: float):
        return type(self)(self.n, float(scalar) * self.coeffs)

    __mul__ = __rmul__

    def _check_same(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __repr__(self):
        kind = "Multiform" if self.dual else "Multivector"
        terms = [f"{c:+g}*[{m:0{self.n}b}]" for m, c in enumerate(self.coeffs) if c != 0.0]
        return f"{kind}({' '.join(terms) or '0'})"


class Multivector(GradedElement):
    dual = False


class Multiform(GradedElement):
    dual = True


def element_type(dual: bool):
    return Multiform if dual else Multivector


def wedge(a: GradedElement, b: GradedElement) -> GradedElement:
    """Exterior product; both arguments on the same side of the duality."""
    if a.dual != b.dual:
        raise TypeError("wedge requires both arguments on the same side")
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    return type(a)(a.n, blades.wedge_coeffs(a.coeffs, b.coeffs, a.n))


def duality_pair(phi: GradedElement, x: GradedElement) -> float:
    """Duality scalar product <Phi, X> with blade orthonormality."""
    if phi.dual == x.dual:
        raise TypeError("duality_pair requires one multiform and one multivector")
    if phi.n != x.n:
        raise ValueError(f"dimension mismatch: {phi.n} vs {x.n}")
    return float(phi.coeffs @ x.coeffs)


def left_contract(phi: GradedElement, x: GradedElement) -> GradedElement:
    """<Phi, X|, fixed by the adjunction <Psi, <Phi,X|> = <Phi^Psi, X>.

    The arguments live on opposite sides; the result lives on the side of x.
    """
    if phi.dual == x.dual:
        raise TypeError("left_contract requires arguments on opposite sides")
    if phi.n != x.n:
        raise ValueError(f"dimension mismatch: {phi.n} vs {x.n}")
    return type(x)(x.n, blades.contract_coeffs(phi.coeffs, x.coeffs, x.n, right=False))


def right_contract(phi: GradedElement, x: GradedElement) -> GradedElement:
    """|Phi, X>, fixed by the adjunction <Psi^Phi, X> = <Psi, |Phi,X>>."""
    if phi.dual == x.dual:
        raise TypeError("right_contract requires arguments on opposite sides")
    if phi.n != x.n:
        raise ValueError(f"dimension mismatch: {phi.n} vs {x.n}")
    return type(x)(x.n, blades.contract_coeffs(phi.coeffs, x.coeffs, x.n, right=True))


def grade_project(a: GradedElement, grades) -> GradedElement:
    mask = blades.grade_mask_vector(a.n, frozenset(grades))
    return type(a)(a.n, a.coeffs * mask)


class VectorOperator:
    """Linear map V -> V given by an n x n matrix in the coordinate basis."""

    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=float)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError("operator matrix must be square")
        self.n = self.matrix.shape[0]
        blades.check_dim(self.n)

    @classmethod
    def identity(cls, n: int):
        return cls(np.eye(n))

    def __call__(self, v: Multivector) -> Multivector:
        out = np.zeros(1 << self.n)
        idx = 1 << np.arange(self.n)
        out[idx] = self.matrix @ v.coeffs[idx]
        return Multivector(self.n, out)

    def inverse(self) -> "VectorOperator":
        det = np.linalg.det(self.matrix)
        if abs(det) <= EPS_INVERTIBLE:
            raise np.linalg.LinAlgError(f"operator not invertible (|det|={abs(det):.3e})")
        return VectorOperator(np.linalg.inv(self.matrix))


class MultivectorOperator:
    r"""Linear operator on /\V (on_forms=False) or on /\V* (on_forms=True)."""

    def __init__(self, n: int, matrix, on_forms: bool = False):
        blades.check_dim(n)
        self.n = n
        self.matrix = np.asarray(matrix, dtype=float)
        if self.matrix.shape != (1 << n, 1 << n):
            raise ValueError(f"expected {(1 << n, 1 << n)} matrix")
        self.on_forms = on_forms

    def __call__(self, x: GradedElement) -> GradedElement:
        if x.dual != self.on_forms:
            raise TypeError("operator side mismatch")
        return type(x)(self.n, self.matrix @ x.coeffs)

    def compose(self, other: "MultivectorOperator") -> "MultivectorOperator":
        if self.on_forms != other.on_forms:
            raise TypeError("operator side mismatch")
        return MultivectorOperator(self.n, self.matrix @ other.matrix, self.on_forms)


def outermorphism_extend(op: VectorOperator) -> MultivectorOperator:
    r"""Unique wedge-multiplicative, unit-preserving extension of op to /\V."""
    return MultivectorOperator(op.n, blades.outer_extension(op.matrix), on_forms=False)


def derivation_extend(op: VectorOperator) -> MultivectorOperator:
    """Unique extension vanishing on scalars, equal to op on vectors and
    satisfying the derivation rule over the exterior product."""
    return MultivectorOperator(op.n, blades.derivation_extension(op.matrix), on_forms=False)


def duality_adjoint(op: MultivectorOperator) -> MultivectorOperator:
    """Operator on the opposite side with <adj(op)(Phi), X> = <Phi, op(X)>.

    With blade orthonormality this is the matrix transpose; the
    construction is involutive.
    """
    return MultivectorOperator(op.n, op.matrix.T, on_forms=not op.on_forms)
