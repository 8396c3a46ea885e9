"""Seeded random instance generation for the verification suites.

Everything is deterministic under (seed, suite, trial, retry): each trial
gets its own `numpy` Generator keyed by that tuple, so reports are
reproducible byte for byte and failing instances can be regenerated in
isolation.

Polynomial test fields carry integer coefficients in [-3, 3] and total
degree <= cfg.degree, so every derivative the identities consume is exact
up to roundoff.  Operator and frame fields are generated as identity plus
a small polynomial perturbation whose entries stay within [-0.3, 0.3] on
the chart box, keeping them invertible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import DeformedStructure, ParallelismStructure, RelativeStructure
from .extensor import ExtensorField, Signature
from .fields import Chart, OperatorFromScalars, PolyField, VectorField, MvFromScalars

SUITE_NAMES = ("algebra", "dcdo", "leibniz", "adjoint", "deform", "split")

DEFAULT_TRIALS = 100
DEFAULT_TOL = 1e-8
DEFAULT_DEGREE = 3
SAMPLE_POINTS = 5
MAX_RETRIES = 3


@dataclass
class SuiteConfig:
    """Configuration of a verification run."""

    dim: int = 3
    seed: int = 0
    degree: int = DEFAULT_DEGREE
    trials: int = DEFAULT_TRIALS
    tol: float = DEFAULT_TOL
    suites: tuple = SUITE_NAMES
    points: int = SAMPLE_POINTS

    def validate(self):
        if not (2 <= self.dim <= 4):
            raise ValueError(f"dim must be in 2..4, got {self.dim}")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.degree < 1 or self.trials < 1 or self.points < 1:
            raise ValueError("degree, trials and points must be positive")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if not self.suites:
            raise ValueError("at least one suite must be selected")
        unknown = set(self.suites) - set(SUITE_NAMES)
        if unknown:
            raise ValueError(f"unknown suites: {sorted(unknown)}; known: {SUITE_NAMES}")
        return self


def trial_rng(cfg: SuiteConfig, suite: str, trial: int, retry: int = 0) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, SUITE_NAMES.index(suite), trial, retry])


# ---------------------------------------------------------------------------
# field generators
# ---------------------------------------------------------------------------


def rand_poly(rng: np.random.Generator, chart: Chart, degree: int, terms: int = 3, scale: float = 1.0) -> PolyField:
    out = {}
    for _ in range(terms):
        total = int(rng.integers(0, degree + 1))
        exps = [0] * chart.n
        for _ in range(total):
            exps[int(rng.integers(0, chart.n))] += 1
        c = int(rng.integers(-3, 4))
        out[tuple(exps)] = out.get(tuple(exps), 0.0) + c * scale
    return PolyField(chart, out)


def rand_scalar_field(rng, chart: Chart, degree: int) -> PolyField:
    return rand_poly(rng, chart, degree)


def rand_vector_field(rng, chart: Chart, degree: int) -> VectorField:
    return VectorField(chart, [rand_poly(rng, chart, degree) for _ in range(chart.n)])


def rand_mv_field(rng, chart: Chart, degree: int, dual: bool, grades=None) -> MvFromScalars:
    from . import blades

    allowed = set(range(chart.n + 1)) if grades is None else set(grades)
    coeffs = []
    for mask in range(chart.dim):
        if blades.grade(mask) in allowed:
            coeffs.append(rand_poly(rng, chart, degree, terms=2))
        else:
            coeffs.append(PolyField(chart, {}))
    return MvFromScalars(chart, coeffs, dual)


def rand_gamma(rng, chart: Chart, degree: int) -> ParallelismStructure:
    n = chart.n
    gamma = [
        [[rand_poly(rng, chart, min(degree, 2), terms=2) for _ in range(n)] for _ in range(n)]
        for _ in range(n)
    ]
    return ParallelismStructure(chart, gamma)


def rand_perturbed_operator(rng, chart: Chart) -> OperatorFromScalars:
    """Identity plus a small polynomial perturbation; entries stay within
    [-0.3, 0.3] on the chart box, so the field is pointwise invertible."""
    n = chart.n
    terms = 2
    scale = 0.9 / (3.0 * terms * n)  # row sums below 0.9 on [-1,1]^n
    entries = []
    for i in range(n):
        row = []
        for j in range(n):
            pert = rand_poly(rng, chart, 2, terms=terms, scale=scale)
            if i == j:
                pert = PolyField(chart, {**{k: v for k, v in pert.terms.items()}, (0,) * n: pert.terms.get((0,) * n, 0.0) + 1.0})
            row.append(pert)
        entries.append(row)
    return OperatorFromScalars(chart, entries)


def rand_deformed(rng, chart: Chart, degree: int) -> DeformedStructure:
    return DeformedStructure(rand_gamma(rng, chart, degree), rand_perturbed_operator(rng, chart))


def rand_relative(rng, chart: Chart, degree: int) -> RelativeStructure:
    return RelativeStructure(rand_gamma(rng, chart, degree), rand_perturbed_operator(rng, chart))


# ---------------------------------------------------------------------------
# extensor generators
# ---------------------------------------------------------------------------


def rand_slot_grades(rng, n: int) -> frozenset:
    mode = rng.integers(0, 3)
    if mode == 0:
        return frozenset({int(rng.integers(1, n + 1))})
    if mode == 1:
        g = int(rng.integers(1, n))
        return frozenset({g, g + 1})
    return frozenset(range(n + 1))


def rand_signature(rng, n: int, k: int | None = None, l: int | None = None, dual_output: bool | None = None) -> Signature:
    if k is None:
        k = int(rng.integers(0, 3))
    if l is None:
        l = int(rng.integers(0, 2)) if k else 1
    if dual_output is None:
        dual_output = bool(rng.integers(0, 2))
    mv = tuple(frozenset({int(rng.integers(1, min(n, 2) + 1))}) for _ in range(k))
    mf = tuple(frozenset({int(rng.integers(1, min(n, 2) + 1))}) for _ in range(l))
    out = frozenset(range(n + 1)) if rng.integers(0, 2) else frozenset({0, 1, 2} & set(range(n + 1)))
    return Signature(mv, mf, dual_output, out)


def rand_extensor(rng, chart: Chart, sig: Signature, degree: int, max_components: int = 12) -> ExtensorField:
    """Sparse tabulated extensor: random polynomial coefficients on a
    bounded number of (slot blades, output blade) cells."""
    from . import blades

    combos = list(sig.combos(chart.n))
    out_blades = blades.blades_of_grades(chart.n, sig.output_grades)
    table: dict = {}
    count = min(max_components, max(1, len(combos)))
    for _ in range(count):
        combo = combos[int(rng.integers(0, len(combos)))]
        mask = out_blades[int(rng.integers(0, len(out_blades)))]
        cell = table.setdefault(combo, {})
        cell[mask] = rand_poly(rng, chart, degree, terms=2)
    return ExtensorField.from_components(chart, sig, table)


def rand_args(rng, chart: Chart, sig: Signature, degree: int):
    """Random polynomial argument fields matching a signature's slots."""
    args = []
    for i in range(sig.arity):
        args.append(rand_mv_field(rng, chart, degree, dual=sig.slot_dual(i), grades=sig.slot_grades(i)))
    return tuple(args)


def gen_instance(cfg: SuiteConfig, kind: str, suite: str = "algebra", trial: int = 0, retry: int = 0):
    """Deterministic named-instance generation under (cfg.seed, suite,
    trial, retry); kinds cover every structure the suites consume."""
    cfg.validate()
    rng = trial_rng(cfg, suite, trial, retry)
    chart = Chart(cfg.dim)
    if kind == "scalar":
        return rand_scalar_field(rng, chart, cfg.degree)
    if kind == "vector":
        return rand_vector_field(rng, chart, cfg.degree)
    if kind == "multivector":
        return rand_mv_field(rng, chart, cfg.degree, dual=False)
    if kind == "multiform":
        return rand_mv_field(rng, chart, cfg.degree, dual=True)
    if kind == "gamma":
        return rand_gamma(rng, chart, cfg.degree)
    if kind == "operator":
        return rand_perturbed_operator(rng, chart)
    if kind == "deformed":
        return rand_deformed(rng, chart, cfg.degree)
    if kind == "relative":
        return rand_relative(rng, chart, cfg.degree)
    if kind == "extensor":
        sig = rand_signature(rng, chart.n)
        return rand_extensor(rng, chart, sig, cfg.degree)
    raise ValueError(f"unknown instance kind {kind!r}")
