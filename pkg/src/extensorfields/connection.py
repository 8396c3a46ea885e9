"""Parallelism structures and their directional covariant derivative
operators on multivector and multiform fields.

Three structures share one derivative interface (`deriv`, plus
`deriv_scalar` and `deriv_vector` conveniences):

* ParallelismStructure: connection coefficients G^k_ij on the chart, with
  nabla_{e_i} e_j = G^k_ij e_k in the coordinate frame (no symmetry
  assumed, torsion allowed).
* DeformedStructure: conjugation of a base derivative by the outermorphism
  extension of an invertible operator field.
* RelativeStructure: frame-split derivative that treats a frame of n
  pointwise independent vector fields as parallel, differentiating frame
  coefficients only.
"""
from __future__ import annotations

from .fields import (
    Chart,
    ConstField,
    CoordDeriv,
    MultivectorField,
    OperatorField,
    OperatorFromScalars,
    ScalarField,
    SumField,
    ProdField,
    VectorField,
    check_chart,
    directional,
    mv_add,
    mv_scale_const,
)


def derivation_action(gamma: OperatorField, f: MultivectorField) -> MultivectorField:
    """Action of the derivation extension of gamma on a field (or of its
    duality adjoint, when f is a multiform field)."""
    return gamma.derivation_extension().apply(f, adjoint=f.dual)


class ParallelismStructure:
    """<U, Gamma>: chart plus n^3 connection coefficient scalar fields,
    indexed gamma[k][i][j] for nabla_{e_i} e_j = G^k_ij e_k."""

    def __init__(self, chart: Chart, gamma):
        self.chart = chart
        n = chart.n
        self.gamma = [[[gamma[k][i][j] for j in range(n)] for i in range(n)] for k in range(n)]

    @classmethod
    def flat(cls, chart: Chart) -> "ParallelismStructure":
        z = ConstField(chart, 0.0)
        n = chart.n
        return cls(chart, [[[z] * n for _ in range(n)] for _ in range(n)])

    def gamma_operator(self, a: VectorField) -> OperatorField:
        """The vector operator field v -> nabla_a v - a(v^k) e_k, i.e. the
        connection term (Gamma_a)^k_j = a^i G^k_ij."""
        check_chart(self, a)
        n = self.chart.n
        entries = [
            [
                SumField(self.chart, [ProdField(self.chart, a.comps[i], self.gamma[k][i][j]) for i in range(n)])
                for j in range(n)
            ]
            for k in range(n)
        ]
        return OperatorFromScalars(self.chart, entries)

    def deriv(self, a: VectorField, f: MultivectorField) -> MultivectorField:
        """a-DCDO on a multivector or multiform field.

        On multivector fields: coefficient derivative plus the derivation
        extension of Gamma_a.  On multiform fields the connection term
        enters with the opposite sign through the duality adjoint, which
        is exactly what the duality Leibniz rule forces.
        """
        check_chart(self, a, f)
        conn = derivation_action(self.gamma_operator(a), f)
        if f.dual:
            return mv_add(CoordDeriv(a, f), mv_scale_const(-1.0, conn))
        return mv_add(CoordDeriv(a, f), conn)

    def deriv_scalar(self, a: VectorField, f: ScalarField) -> ScalarField:
        return directional(a, f)

    def deriv_vector(self, a: VectorField, v: VectorField) -> VectorField:
        g = self.deriv(a, v.as_field())
        return VectorField(self.chart, [g.coeff(1 << i) for i in range(self.chart.n)])


class DeformedStructure:
    """<U, Gamma^lambda>: base structure deformed by an invertible operator
    field; the a-DCDO is the extension-conjugated base derivative."""

    def __init__(self, base: ParallelismStructure, lam: OperatorField):
        check_chart(base, lam)
        self.base = base
        self.lam = lam
        self.chart = base.chart
        self._ext = lam.outer_extension()
        self._ext_inv = lam.inverse().outer_extension()

    def deriv(self, a: VectorField, f: MultivectorField) -> MultivectorField:
        check_chart(self, a, f)
        if f.dual:
            # lambda^{-adj}( nabla_a( lambda^adj Phi ) )
            inner = self.base.deriv(a, self._ext.apply(f, adjoint=True))
            return self._ext_inv.apply(inner, adjoint=True)
        return self._ext.apply(self.base.deriv(a, self._ext_inv.apply(f)))

    def deriv_scalar(self, a: VectorField, f: ScalarField) -> ScalarField:
        return directional(a, f)

    def deriv_vector(self, a: VectorField, v: VectorField) -> VectorField:
        g = self.deriv(a, v.as_field())
        return VectorField(self.chart, [g.coeff(1 << i) for i in range(self.chart.n)])

    def coefficient_structure(self) -> ParallelismStructure:
        """Deformed connection coefficients read off from nabla^lam_{e_i} e_j;
        cross-check path against the conjugation formula."""
        n = self.chart.n
        cols = [
            [self.deriv_vector(VectorField.basis(self.chart, i), VectorField.basis(self.chart, j)) for j in range(n)]
            for i in range(n)
        ]
        gamma = [[[cols[i][j].comps[k] for j in range(n)] for i in range(n)] for k in range(n)]
        return ParallelismStructure(self.chart, gamma)


class RelativeStructure:
    """<U, B>: frame of n vector fields, pointwise linearly independent,
    with its associated frame-split a-DCDO (the frame legs are parallel).

    `base` is the compatible parallelism structure living on the same
    chart; it supplies the nabla_a that the split theorem compares with.
    """

    def __init__(self, base: ParallelismStructure, frame: OperatorField):
        check_chart(base, frame)
        self.base = base
        self.frame = frame
        self.chart = base.chart
        self._ext = frame.outer_extension()
        self._ext_inv = frame.inverse().outer_extension()
        self._flat = ParallelismStructure.flat(self.chart)

    def frame_leg(self, j: int) -> VectorField:
        return VectorField(self.chart, [self.frame.entry(i, j) for i in range(self.chart.n)])

    def deriv(self, a: VectorField, f: MultivectorField) -> MultivectorField:
        """partial_a: expand in frame blades, differentiate the coefficients
        only.  Equivalently B-conjugation of the flat coefficient derivative
        (reciprocal-frame expansion on the multiform side)."""
        check_chart(self, a, f)
        if f.dual:
            inner = CoordDeriv(a, self._ext.apply(f, adjoint=True))
            return self._ext_inv.apply(inner, adjoint=True)
        return self._ext.apply(CoordDeriv(a, self._ext_inv.apply(f)))

    def deriv_scalar(self, a: VectorField, f: ScalarField) -> ScalarField:
        return directional(a, f)

    def deriv_vector(self, a: VectorField, v: VectorField) -> VectorField:
        g = self.deriv(a, v.as_field())
        return VectorField(self.chart, [g.coeff(1 << i) for i in range(self.chart.n)])

    def connection_operator(self, a: VectorField) -> OperatorField:
        """Relative connection field gamma_a = nabla_a - partial_a on vector
        fields; tensoriality in the vector argument is a checked property,
        not an assumption."""
        n = self.chart.n
        cols = []
        for j in range(n):
            ej = VectorField.basis(self.chart, j)
            nab = self.base.deriv_vector(a, ej)
            par = self.deriv_vector(a, ej)
            cols.append([nab.comps[k] - par.comps[k] for k in range(n)])
        return OperatorFromScalars(self.chart, [[cols[j][k] for j in range(n)] for k in range(n)])
