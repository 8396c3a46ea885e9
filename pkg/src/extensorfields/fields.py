"""Smooth fields on an open chart U inside R^n with exact first-order jets.

Every field evaluates to a value and a gradient at a point; composite
fields propagate jets by the product/chain rule, so directional
derivatives of anything the library constructs are exact up to roundoff.
Test fields are polynomials, whose jets are exact by construction.
Gradients are computed lazily: a node only pays for second-order
information (finite-difference fallback on derivative nodes) if someone
actually differentiates it, which the shipped identities never do.

Fields are immutable after construction and evaluators are pure, so
concurrent evaluation at distinct points is safe.  Each node carries a
one-point cache keyed by the coordinates, which makes shared
subexpressions (common in extensor components) cheap to re-evaluate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import blades
from .algebra import EPS_INVERTIBLE, element_type

_FD_STEP = 1e-6


@dataclass(frozen=True)
class Chart:
    """Axis-aligned box in R^n used as the sampling domain."""

    n: int
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        blades.check_dim(self.n)
        if not self.lo < self.hi:
            raise ValueError("chart box must have nonempty interior")

    @property
    def dim(self) -> int:
        return 1 << self.n

    def contains(self, p, tol: float = 1e-9) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lo - tol) and np.all(p <= self.hi + tol))

    def require(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape != (self.n,):
            raise ValueError(f"expected a point in R^{self.n}, got shape {p.shape}")
        if not self.contains(p):
            raise ValueError(f"point {p} outside chart box [{self.lo}, {self.hi}]^{self.n}")
        return p

    def sample(self, rng: np.random.Generator, count: int = 1) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(count, self.n))


def check_chart(*objs):
    charts = {o.chart for o in objs}
    if len(charts) != 1:
        raise ValueError(f"chart mismatch: {charts}")
    return next(iter(charts))


def _aspoint(p) -> np.ndarray:
    return p if isinstance(p, np.ndarray) and p.dtype == float else np.asarray(p, dtype=float)


class _Jetted:
    """Lazily jetted field node: per-point caches for values and gradients."""

    def __init__(self, chart: Chart):
        self.chart = chart
        self._vkey = self._gkey = None
        self._vcache = self._gcache = None

    def vals(self, p):
        if type(p) is not np.ndarray:
            p = _aspoint(p)
        key = p.tobytes()
        if key != self._vkey:
            self._vcache = self._vals(p)
            self._vkey = key
        return self._vcache

    def grads(self, p):
        if type(p) is not np.ndarray:
            p = _aspoint(p)
        key = p.tobytes()
        if key != self._gkey:
            self._gcache = self._grads(p)
            self._gkey = key
        return self._gcache

    def jet(self, p):
        """(value, gradient) pair; the first-order jet contract."""
        if type(p) is not np.ndarray:
            p = _aspoint(p)
        return self.vals(p), self.grads(p)

    def _vals(self, p):  # pragma: no cover - abstract
        raise NotImplementedError

    def _grads(self, p):
        """Central-difference fallback; exact-jet nodes override this."""
        n = self.chart.n
        h = _FD_STEP
        cols = []
        for k in range(n):
            dp = np.zeros(n)
            dp[k] = h
            cols.append((self._vals(p + dp) - self._vals(p - dp)) / (2.0 * h))
        return np.stack([np.asarray(c, dtype=float) for c in cols])


# ---------------------------------------------------------------------------
# scalar fields
# ---------------------------------------------------------------------------


class ScalarField(_Jetted):
    """Map U -> R with a first-order jet (value, gradient)."""

    def value(self, p) -> float:
        return float(self.vals(self.chart.require(p)))

    def gradient(self, p) -> np.ndarray:
        return self.grads(self.chart.require(p))

    def _coerce(self, other) -> "ScalarField":
        if isinstance(other, ScalarField):
            return other
        return ConstField(self.chart, float(other))

    def __add__(self, other):
        return SumField(self.chart, (self, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return SumField(self.chart, (self, -self._coerce(other)))

    def __rsub__(self, other):
        return SumField(self.chart, (self._coerce(other), -self))

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            return ProdField(self.chart, self, other)
        return ScaledField(self.chart, float(other), self)

    __rmul__ = __mul__

    def __neg__(self):
        return ScaledField(self.chart, -1.0, self)


class ConstField(ScalarField):
    def __init__(self, chart: Chart, c: float):
        super().__init__(chart)
        self.c = float(c)

    def _vals(self, p):
        return self.c

    def _grads(self, p):
        return np.zeros(self.chart.n)


class PolyField(ScalarField):
    """Polynomial in the chart coordinates; terms maps exponent tuples to
    coefficients.  Jets are exact."""

    def __init__(self, chart: Chart, terms: dict):
        super().__init__(chart)
        self.terms = {tuple(int(e) for e in k): float(v) for k, v in terms.items() if v != 0.0}
        for k in self.terms:
            if len(k) != chart.n or any(e < 0 for e in k):
                raise ValueError(f"bad exponent vector {k} for n={chart.n}")
        items = sorted(self.terms.items())
        n = chart.n
        self._exps = np.array([k for k, _ in items], dtype=float).reshape(len(items), n)
        self._coeffs = np.array([v for _, v in items])
        # fused derivative table: d/dx_i sum c x^e = sum (c e_i) x^(e - delta_i)
        rows, coefs, idx = [], [], []
        for i in range(n):
            for k, v in items:
                if k[i]:
                    rows.append(k[:i] + (k[i] - 1,) + k[i + 1 :])
                    coefs.append(v * k[i])
                    idx.append(i)
        self._dexps = np.array(rows, dtype=float).reshape(len(rows), n)
        self._dcoeffs = np.array(coefs)
        self._didx = np.array(idx, dtype=int)

    @classmethod
    def coordinate(cls, chart: Chart, i: int) -> "PolyField":
        exps = [0] * chart.n
        exps[i] = 1
        return cls(chart, {tuple(exps): 1.0})

    def _vals(self, p):
        if not self._coeffs.size:
            return 0.0
        return float(self._coeffs @ (p**self._exps).prod(axis=1))

    def _grads(self, p):
        if not self._dcoeffs.size:
            return np.zeros(self.chart.n)
        contrib = self._dcoeffs * (p**self._dexps).prod(axis=1)
        return np.bincount(self._didx, weights=contrib, minlength=self.chart.n)


class SumField(ScalarField):
    def __init__(self, chart: Chart, parts):
        super().__init__(chart)
        flat = []
        for f in parts:
            if isinstance(f, SumField):
                flat.extend(f.parts)
            else:
                flat.append(f)
        self.parts = tuple(flat)

    def _vals(self, p):
        return sum(f.vals(p) for f in self.parts)

    def _grads(self, p):
        return sum(f.grads(p) for f in self.parts)


class ProdField(ScalarField):
    def __init__(self, chart: Chart, a: ScalarField, b: ScalarField):
        super().__init__(chart)
        self.a, self.b = a, b

    def _vals(self, p):
        return self.a.vals(p) * self.b.vals(p)

    def _grads(self, p):
        return self.a.vals(p) * self.b.grads(p) + self.b.vals(p) * self.a.grads(p)


class ScaledField(ScalarField):
    def __init__(self, chart: Chart, c: float, f: ScalarField):
        super().__init__(chart)
        self.c, self.f = c, f

    def _vals(self, p):
        return self.c * self.f.vals(p)

    def _grads(self, p):
        return self.c * self.f.grads(p)


class DirectionalField(ScalarField):
    """(af)(p) = sum_i a^i(p) df/dx^i(p), exact through the operand jet.
    Its own gradient is second-order information and uses the
    finite-difference fallback; nothing in the library consumes it."""

    def __init__(self, a: "VectorField", f: ScalarField):
        check_chart(a, f)
        super().__init__(f.chart)
        self.a, self.f = a, f

    def _vals(self, p):
        return float(self.a.vals(p) @ self.f.grads(p))


def directional(a: "VectorField", f: ScalarField) -> ScalarField:
    """Directional derivative of a scalar field along a vector field."""
    return DirectionalField(a, f)


# ---------------------------------------------------------------------------
# vector fields
# ---------------------------------------------------------------------------


class VectorField(_Jetted):
    """n scalar component fields in the coordinate frame."""

    def __init__(self, chart: Chart, comps):
        super().__init__(chart)
        comps = tuple(comps)
        if len(comps) != chart.n:
            raise ValueError(f"expected {chart.n} components")
        self.comps = comps

    @classmethod
    def basis(cls, chart: Chart, i: int) -> "VectorField":
        return cls(chart, [ConstField(chart, 1.0 if j == i else 0.0) for j in range(chart.n)])

    @classmethod
    def constant(cls, chart: Chart, vec) -> "VectorField":
        return cls(chart, [ConstField(chart, v) for v in vec])

    def _vals(self, p):
        return np.array([f.vals(p) for f in self.comps])

    def _grads(self, p):
        return np.stack([f.grads(p) for f in self.comps], axis=1)

    def value(self, p) -> np.ndarray:
        return self.vals(self.chart.require(p))

    def __add__(self, other):
        check_chart(self, other)
        return VectorField(self.chart, [a + b for a, b in zip(self.comps, other.comps)])

    def scale(self, f: ScalarField) -> "VectorField":
        return VectorField(self.chart, [f * c for c in self.comps])

    def as_field(self) -> "MultivectorField":
        """The same data viewed as a grade-1 multivector field."""
        coeffs = [ConstField(self.chart, 0.0)] * self.chart.dim
        for i, c in enumerate(self.comps):
            coeffs[1 << i] = c
        return MvFromScalars(self.chart, coeffs, dual=False)


# ---------------------------------------------------------------------------
# multivector / multiform fields
# ---------------------------------------------------------------------------


class MultivectorField(_Jetted):
    """Field of 2^n blade coefficients; dual=True for multiform fields.

    vals(p) has shape (2^n,); grads(p) has shape (n, 2^n) with grads[k]
    the coefficient-wise d/dx^k.
    """

    dual = False

    def value(self, p):
        return element_type(self.dual)(self.chart.n, self.vals(self.chart.require(p)))

    def coeff(self, mask: int) -> ScalarField:
        return CoeffView(self, mask)

    def __add__(self, other):
        return mv_add(self, other)

    def __sub__(self, other):
        return mv_add(self, mv_scale_const(-1.0, other))

    def __neg__(self):
        return mv_scale_const(-1.0, self)


class CoeffView(ScalarField):
    def __init__(self, src: MultivectorField, mask: int):
        super().__init__(src.chart)
        self.src, self.mask = src, mask

    def _vals(self, p):
        return float(self.src.vals(p)[self.mask])

    def _grads(self, p):
        return self.src.grads(p)[:, self.mask]


class MvFromScalars(MultivectorField):
    def __init__(self, chart: Chart, coeffs, dual: bool):
        super().__init__(chart)
        coeffs = tuple(coeffs)
        if len(coeffs) != chart.dim:
            raise ValueError(f"expected {chart.dim} coefficient fields")
        self.coeffs = coeffs
        self.dual = dual

    def _vals(self, p):
        return np.array([f.vals(p) for f in self.coeffs])

    def _grads(self, p):
        return np.stack([f.grads(p) for f in self.coeffs], axis=1)


class MvConst(MultivectorField):
    def __init__(self, chart: Chart, element):
        super().__init__(chart)
        if element.n != chart.n:
            raise ValueError("dimension mismatch")
        self._c = element.coeffs.copy()
        self.dual = element.dual

    def _vals(self, p):
        return self._c

    def _grads(self, p):
        return np.zeros((self.chart.n, self.chart.dim))


class _MvSum(MultivectorField):
    def __init__(self, chart: Chart, parts, dual: bool):
        super().__init__(chart)
        flat = []
        for f in parts:
            if isinstance(f, _MvSum):
                flat.extend(f.parts)
            else:
                flat.append(f)
        self.parts = tuple(flat)
        self.dual = dual

    def _vals(self, p):
        return sum(f.vals(p) for f in self.parts)

    def _grads(self, p):
        return sum(f.grads(p) for f in self.parts)


class _MvScale(MultivectorField):
    def __init__(self, s: ScalarField, f: MultivectorField):
        check_chart(s, f)
        super().__init__(f.chart)
        self.s, self.f = s, f
        self.dual = f.dual

    def _vals(self, p):
        return self.s.vals(p) * self.f.vals(p)

    def _grads(self, p):
        return self.s.vals(p) * self.f.grads(p) + self.s.grads(p)[:, None] * self.f.vals(p)[None, :]


class _MvScaleConst(MultivectorField):
    def __init__(self, c: float, f: MultivectorField):
        super().__init__(f.chart)
        self.c, self.f = c, f
        self.dual = f.dual

    def _vals(self, p):
        return self.c * self.f.vals(p)

    def _grads(self, p):
        return self.c * self.f.grads(p)


class _MvWedge(MultivectorField):
    def __init__(self, a: MultivectorField, b: MultivectorField):
        if a.dual != b.dual:
            raise TypeError("wedge requires both fields on the same side")
        check_chart(a, b)
        super().__init__(a.chart)
        self.a, self.b = a, b
        self.dual = a.dual

    def _vals(self, p):
        return blades.wedge_coeffs(self.a.vals(p), self.b.vals(p), self.chart.n)

    def _grads(self, p):
        n = self.chart.n
        av, bv = self.a.vals(p), self.b.vals(p)
        ag, bg = self.a.grads(p), self.b.grads(p)
        return blades.wedge_coeffs(ag, bv[None, :], n) + blades.wedge_coeffs(av[None, :], bg, n)


class _MvContract(MultivectorField):
    def __init__(self, a: MultivectorField, b: MultivectorField, right: bool):
        if a.dual == b.dual:
            raise TypeError("contraction requires fields on opposite sides")
        check_chart(a, b)
        super().__init__(a.chart)
        self.a, self.b, self.right = a, b, right
        self.dual = b.dual

    def _vals(self, p):
        return blades.contract_coeffs(self.a.vals(p), self.b.vals(p), self.chart.n, self.right)

    def _grads(self, p):
        n = self.chart.n
        av, bv = self.a.vals(p), self.b.vals(p)
        ag, bg = self.a.grads(p), self.b.grads(p)
        return blades.contract_coeffs(ag, bv[None, :], n, self.right) + blades.contract_coeffs(
            av[None, :], bg, n, self.right
        )


class _MvGradeProject(MultivectorField):
    def __init__(self, f: MultivectorField, grades):
        super().__init__(f.chart)
        self.f = f
        self.mask_vec = blades.grade_mask_vector(f.chart.n, frozenset(grades))
        self.dual = f.dual

    def _vals(self, p):
        return self.f.vals(p) * self.mask_vec

    def _grads(self, p):
        return self.f.grads(p) * self.mask_vec[None, :]


class PairField(ScalarField):
    """Pointwise duality scalar product of a multiform and a multivector field."""

    def __init__(self, a: MultivectorField, b: MultivectorField):
        if a.dual == b.dual:
            raise TypeError("duality pairing requires fields on opposite sides")
        check_chart(a, b)
        super().__init__(a.chart)
        self.a, self.b = a, b

    def _vals(self, p):
        return float(self.a.vals(p) @ self.b.vals(p))

    def _grads(self, p):
        return self.a.grads(p) @ self.b.vals(p) + self.b.grads(p) @ self.a.vals(p)


class CoordDeriv(MultivectorField):
    """Coefficient-wise directional derivative sum_k a^k d/dx^k of a field.

    Values are exact from the operand's jet; the node's own gradient is
    second-order information left to the finite-difference fallback.
    """

    def __init__(self, a: VectorField, f: MultivectorField):
        check_chart(a, f)
        super().__init__(f.chart)
        self.a, self.f = a, f
        self.dual = f.dual

    def _vals(self, p):
        return self.a.vals(p) @ self.f.grads(p)


# public constructors ------------------------------------------------------


def mv_constant(chart: Chart, element) -> MultivectorField:
    return MvConst(chart, element)


def mv_from_scalars(chart: Chart, coeffs, dual: bool) -> MultivectorField:
    return MvFromScalars(chart, coeffs, dual)


def mv_zero(chart: Chart, dual: bool) -> MultivectorField:
    z = ConstField(chart, 0.0)
    return MvFromScalars(chart, [z] * chart.dim, dual)


def mv_add(*fields) -> MultivectorField:
    duals = {f.dual for f in fields}
    if len(duals) != 1:
        raise TypeError("cannot add fields on opposite sides")
    check_chart(*fields)
    return _MvSum(fields[0].chart, fields, duals.pop())


def mv_scale(s: ScalarField, f: MultivectorField) -> MultivectorField:
    return _MvScale(s, f)


def mv_scale_const(c: float, f: MultivectorField) -> MultivectorField:
    return _MvScaleConst(float(c), f)


def mv_wedge(a: MultivectorField, b: MultivectorField) -> MultivectorField:
    return _MvWedge(a, b)


def mv_pair(a: MultivectorField, b: MultivectorField) -> ScalarField:
    return PairField(a, b)


def mv_left_contract(a: MultivectorField, b: MultivectorField) -> MultivectorField:
    return _MvContract(a, b, right=False)


def mv_right_contract(a: MultivectorField, b: MultivectorField) -> MultivectorField:
    return _MvContract(a, b, right=True)


def mv_grade_project(f: MultivectorField, grades) -> MultivectorField:
    return _MvGradeProject(f, grades)


_LIFT_TABLE = {
    "wedge": mv_wedge,
    "duality_pair": mv_pair,
    "left_contract": mv_left_contract,
    "right_contract": mv_right_contract,
}


def lift_pointwise(op: str, *fields, **kwargs):
    """Pointwise lift of an algebra operation to fields, by name.

    eval(lift(op, Fs), p) == op(eval(F1, p), ...) at every chart point.
    """
    if op == "grade_project":
        return mv_grade_project(*fields, **kwargs)
    try:
        fn = _LIFT_TABLE[op]
    except KeyError:
        raise ValueError(f"unknown pointwise op {op!r}") from None
    return fn(*fields, **kwargs)


# ---------------------------------------------------------------------------
# operator fields (n x n) and their exterior extensions
# ---------------------------------------------------------------------------


class OperatorField(_Jetted):
    """Field of linear operators V -> V; vals(p) is the n x n matrix and
    grads(p)[k] its entrywise d/dx^k."""

    def entry(self, i: int, j: int) -> ScalarField:
        return _OpEntryView(self, i, j)

    def apply(self, v: VectorField) -> VectorField:
        check_chart(self, v)
        n = self.chart.n
        comps = [
            SumField(self.chart, [ProdField(self.chart, self.entry(i, j), v.comps[j]) for j in range(n)])
            for i in range(n)
        ]
        return VectorField(self.chart, comps)

    def inverse(self) -> "OperatorField":
        return _InverseOperatorField(self)

    def det_at(self, p) -> float:
        return float(np.linalg.det(self.vals(_aspoint(p))))

    def outer_extension(self) -> "ExtensionField":
        return ExtensionField(self, derivation=False)

    def derivation_extension(self) -> "ExtensionField":
        return ExtensionField(self, derivation=True)


class _OpEntryView(ScalarField):
    def __init__(self, op: OperatorField, i: int, j: int):
        super().__init__(op.chart)
        self.op, self.i, self.j = op, i, j

    def _vals(self, p):
        return float(self.op.vals(p)[self.i, self.j])

    def _grads(self, p):
        return self.op.grads(p)[:, self.i, self.j]


class OperatorFromScalars(OperatorField):
    def __init__(self, chart: Chart, entries):
        super().__init__(chart)
        entries = [list(row) for row in entries]
        if len(entries) != chart.n or any(len(r) != chart.n for r in entries):
            raise ValueError(f"expected {chart.n} x {chart.n} entries")
        self.entries = entries

    @classmethod
    def constant(cls, chart: Chart, matrix):
        matrix = np.asarray(matrix, dtype=float)
        return cls(chart, [[ConstField(chart, matrix[i, j]) for j in range(chart.n)] for i in range(chart.n)])

    @classmethod
    def identity(cls, chart: Chart):
        return cls.constant(chart, np.eye(chart.n))

    def entry(self, i, j):
        return self.entries[i][j]

    def _vals(self, p):
        n = self.chart.n
        return np.array([[self.entries[i][j].vals(p) for j in range(n)] for i in range(n)])

    def _grads(self, p):
        n = self.chart.n
        da = np.zeros((n, n, n))
        for i in range(n):
            for j in range(n):
                da[:, i, j] = self.entries[i][j].grads(p)
        return da


class _InverseOperatorField(OperatorField):
    """Pointwise matrix inverse with exact jet: d(A^-1) = -A^-1 dA A^-1."""

    def __init__(self, base: OperatorField):
        super().__init__(base.chart)
        self.base = base

    def inverse(self) -> OperatorField:
        return self.base

    def _vals(self, p):
        a = self.base.vals(p)
        det = np.linalg.det(a)
        if abs(det) <= EPS_INVERTIBLE:
            raise np.linalg.LinAlgError(f"operator field singular at {p} (|det|={abs(det):.3e})")
        return np.linalg.inv(a)

    def _grads(self, p):
        inv = self.vals(p)
        return -inv @ self.base.grads(p) @ inv


class ExtensionField(_Jetted):
    """Outermorphism or derivation extension of an operator field, as a
    2^n x 2^n matrix field with exact jet."""

    def __init__(self, op: OperatorField, derivation: bool):
        super().__init__(op.chart)
        self.op = op
        self.derivation = derivation

    def _vals(self, p):
        a = self.op.vals(p)
        if self.derivation:
            return blades.derivation_extension(a)
        return blades.outer_extension(a)

    def _grads(self, p):
        a, da = self.op.vals(p), self.op.grads(p)
        if self.derivation:
            return np.einsum("xkj,kjab->xab", da, blades._derivation_basis(self.chart.n))
        return blades.outer_extension_jet(a, da)[1]

    def apply(self, f: MultivectorField, adjoint: bool = False) -> MultivectorField:
        """Apply the extension (adjoint=False, on multivector fields) or its
        duality adjoint, i.e. the matrix transpose (adjoint=True, on
        multiform fields)."""
        return _MvApplyExtension(self, f, adjoint)


class _MvApplyExtension(MultivectorField):
    def __init__(self, ext: ExtensionField, f: MultivectorField, adjoint: bool):
        check_chart(ext, f)
        if f.dual != adjoint:
            raise TypeError("extension acts on multivector fields; its adjoint on multiform fields")
        super().__init__(f.chart)
        self.ext, self.f, self.adjoint = ext, f, adjoint
        self.dual = f.dual

    def _vals(self, p):
        m = self.ext.vals(p)
        fv = self.f.vals(p)
        return m.T @ fv if self.adjoint else m @ fv

    def _grads(self, p):
        m, dm = self.ext.vals(p), self.ext.grads(p)
        fv, fg = self.f.vals(p), self.f.grads(p)
        if self.adjoint:
            return np.einsum("xba,b->xa", dm, fv) + fg @ m
        return np.einsum("xab,b->xa", dm, fv) + fg @ m.T
