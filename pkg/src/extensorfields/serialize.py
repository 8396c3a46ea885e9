"""Fixture (de)serialization for the verification harness.

Formats are plain JSON-ready structures:

* elements: flat coefficient lists in blade-mask order, with side flag;
* polynomial scalar fields: sorted list of [exponent vector, coefficient];
* multivector/multiform, vector and operator fields: nested polynomial
  lists per component;
* tabulated extensor fields: signature header plus a sparse list of
  (slot-blade tuple, output blade, polynomial) cells.

Only polynomial-built fields round-trip; derived field nodes are not
serializable and raise TypeError.
"""
from __future__ import annotations

import json

from .algebra import GradedElement, element_type
from .connection import ParallelismStructure
from .extensor import ExtensorField, Signature
from .fields import (
    Chart,
    ConstField,
    MvFromScalars,
    OperatorFromScalars,
    PolyField,
    ScalarField,
    VectorField,
)

FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# charts, elements, polynomials
# ---------------------------------------------------------------------------


def chart_to_data(chart: Chart) -> dict:
    return {"n": chart.n, "lo": chart.lo, "hi": chart.hi}


def chart_from_data(data: dict) -> Chart:
    return Chart(int(data["n"]), float(data["lo"]), float(data["hi"]))


def element_to_data(x: GradedElement) -> dict:
    return {"n": x.n, "dual": x.dual, "coeffs": [float(c) for c in x.coeffs]}


def element_from_data(data: dict) -> GradedElement:
    return element_type(bool(data["dual"]))(int(data["n"]), data["coeffs"])


def _poly_terms(f: ScalarField, n: int) -> dict:
    if isinstance(f, PolyField):
        return dict(f.terms)
    if isinstance(f, ConstField):
        return {(0,) * n: f.c} if f.c else {}
    raise TypeError(f"cannot serialize a {type(f).__name__}; only polynomial fields round-trip")


def poly_to_data(f: ScalarField, n: int) -> list:
    return [[list(exps), c] for exps, c in sorted(_poly_terms(f, n).items())]


def poly_from_data(chart: Chart, data) -> PolyField:
    return PolyField(chart, {tuple(int(e) for e in exps): float(c) for exps, c in data})


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------


def mv_field_to_data(f: MvFromScalars) -> dict:
    n = f.chart.n
    return {"dual": f.dual, "coeffs": [poly_to_data(c, n) for c in f.coeffs]}


def mv_field_from_data(chart: Chart, data: dict) -> MvFromScalars:
    coeffs = [poly_from_data(chart, d) for d in data["coeffs"]]
    return MvFromScalars(chart, coeffs, bool(data["dual"]))


def vector_field_to_data(v: VectorField) -> list:
    return [poly_to_data(c, v.chart.n) for c in v.comps]


def vector_field_from_data(chart: Chart, data) -> VectorField:
    return VectorField(chart, [poly_from_data(chart, d) for d in data])


def operator_to_data(op: OperatorFromScalars) -> list:
    n = op.chart.n
    return [[poly_to_data(op.entries[i][j], n) for j in range(n)] for i in range(n)]


def operator_from_data(chart: Chart, data) -> OperatorFromScalars:
    return OperatorFromScalars(chart, [[poly_from_data(chart, e) for e in row] for row in data])


def gamma_to_data(s: ParallelismStructure) -> list:
    n = s.chart.n
    return [
        [[poly_to_data(s.gamma[k][i][j], n) for j in range(n)] for i in range(n)]
        for k in range(n)
    ]


def gamma_from_data(chart: Chart, data) -> ParallelismStructure:
    gamma = [[[poly_from_data(chart, e) for e in row] for row in plane] for plane in data]
    return ParallelismStructure(chart, gamma)


# ---------------------------------------------------------------------------
# extensor fixtures
# ---------------------------------------------------------------------------


def signature_to_data(sig: Signature) -> dict:
    return {
        "mv_slots": [sorted(g) for g in sig.mv_slots],
        "mf_slots": [sorted(g) for g in sig.mf_slots],
        "dual_output": sig.dual_output,
        "output_grades": sorted(sig.output_grades),
    }


def signature_from_data(data: dict) -> Signature:
    return Signature(
        tuple(frozenset(g) for g in data["mv_slots"]),
        tuple(frozenset(g) for g in data["mf_slots"]),
        bool(data["dual_output"]),
        frozenset(data["output_grades"]),
    )


def extensor_to_data(t: ExtensorField) -> dict:
    """Sparse cell list over the signature's slot-blade combinations; the
    extensor must be polynomial-tabulated (components are coefficient
    fields, as produced by from_components or the instance generators)."""
    n = t.chart.n
    cells = []
    for combo in t.signature.combos(n):
        comp = t.component(combo)
        if comp is None:
            continue
        if not isinstance(comp, MvFromScalars):
            raise TypeError("only tabulated extensor fields serialize; derived extensors do not")
        for mask in range(t.chart.dim):
            terms = poly_to_data(comp.coeffs[mask], n)
            if terms:
                cells.append({"slots": list(combo), "blade": mask, "poly": terms})
    return {"signature": signature_to_data(t.signature), "cells": cells}


def extensor_from_data(chart: Chart, data: dict) -> ExtensorField:
    sig = signature_from_data(data["signature"])
    table: dict = {}
    for cell in data["cells"]:
        combo = tuple(int(m) for m in cell["slots"])
        table.setdefault(combo, {})[int(cell["blade"])] = poly_from_data(chart, cell["poly"])
    return ExtensorField.from_components(chart, sig, table)


# ---------------------------------------------------------------------------
# fixture files
# ---------------------------------------------------------------------------

_KINDS = {
    "element": (element_to_data, lambda chart, d: element_from_data(d)),
    "poly": (None, poly_from_data),
    "multivector": (mv_field_to_data, mv_field_from_data),
    "vector": (vector_field_to_data, vector_field_from_data),
    "operator": (operator_to_data, operator_from_data),
    "gamma": (gamma_to_data, gamma_from_data),
    "extensor": (extensor_to_data, extensor_from_data),
}


def fixture_to_data(kind: str, obj, chart: Chart | None = None) -> dict:
    if kind not in _KINDS:
        raise ValueError(f"unknown fixture kind {kind!r}")
    if kind == "poly":
        body = poly_to_data(obj, chart.n if chart is not None else obj.chart.n)
    else:
        body = _KINDS[kind][0](obj)
    ch = chart if chart is not None else getattr(obj, "chart", None)
    out = {"format_version": FORMAT_VERSION, "kind": kind, "data": body}
    if ch is not None:
        out["chart"] = chart_to_data(ch)
    return out


def fixture_from_data(data: dict):
    if data.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported fixture format version {data.get('format_version')!r}")
    kind = data["kind"]
    if kind not in _KINDS:
        raise ValueError(f"unknown fixture kind {kind!r}")
    if kind == "element":
        return element_from_data(data["data"])
    chart = chart_from_data(data["chart"])
    return _KINDS[kind][1](chart, data["data"])


def save_fixture(path, kind: str, obj, chart: Chart | None = None):
    with open(path, "w") as fh:
        json.dump(fixture_to_data(kind, obj, chart), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_fixture(path):
    with open(path) as fh:
        return fixture_from_data(json.load(fh))
