"""Identity suites: randomized trials for every identity the library
exposes, with residual aggregation and pass/fail reports.

Residual metric: max over sampled points and output blades of
|lhs - rhs| / max(1, |lhs|, |rhs|) -- scale-free, with the denominator
floor acting as an absolute tolerance near zero.  Trials are independent;
aggregation is a max-reduction, so evaluation order cannot affect reports.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from . import __version__, algebra as al
from .extensor import (
    ExtensorField,
    Signature,
    adjoint_ext,
    cov_deriv_apply,
    cov_deriv_extensor,
    deformed_cov_deriv_ext,
    lcontract_ext,
    pairing_ext,
    rcontract_ext,
    split_identity,
    wedge_ext,
)
from .fields import Chart, directional, mv_pair, mv_scale, mv_wedge
from .randgen import (
    MAX_RETRIES,
    SUITE_NAMES,
    SuiteConfig,
    rand_args,
    rand_deformed,
    rand_extensor,
    rand_gamma,
    rand_mv_field,
    rand_poly,
    rand_relative,
    rand_signature,
    rand_vector_field,
    trial_rng,
)


class ResidualTracker:
    """Max-reduction accumulator over all assertions of a suite."""

    def __init__(self):
        self.max_rel = 0.0
        self.max_abs = 0.0
        self.worst = ""

    def record(self, lhs, rhs, tag: str):
        lhs = np.atleast_1d(np.asarray(lhs, dtype=float))
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        diff = np.abs(lhs - rhs)
        den = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
        rel = float(np.max(diff / den))
        ab = float(np.max(diff))
        if rel > self.max_rel:
            self.max_rel = rel
            self.worst = tag
        self.max_abs = max(self.max_abs, ab)

    def record_fields(self, lhs, rhs, points, tag: str):
        for idx, p in enumerate(points):
            self.record(lhs.vals(p), rhs.vals(p), f"{tag}@pt{idx}")

    def record_scalar_fields(self, lhs, rhs, points, tag: str):
        for idx, p in enumerate(points):
            self.record(lhs.vals(p), rhs.vals(p), f"{tag}@pt{idx}")

    def record_extensors(self, lhs: ExtensorField, rhs: ExtensorField, args, points, tag: str):
        lf = lhs(*args)
        rf = rhs(*args)
        self.record_fields(lf, rf, points, tag)


# ---------------------------------------------------------------------------
# suite trials
# ---------------------------------------------------------------------------


def _rand_element(rng, n: int, dual: bool):
    cls = al.Multiform if dual else al.Multivector
    return cls(n, rng.uniform(-1.0, 1.0, 1 << n))


def _rand_vector_elem(rng, n: int):
    return al.Multivector.from_vector(rng.uniform(-1.0, 1.0, n))


def trial_algebra(cfg: SuiteConfig, chart: Chart, rng, tr: ResidualTracker, tag: str):
    """Pointwise algebra: wedge laws, contraction adjunctions, the three
    operator constructions and the duality adjoint relation."""
    n = cfg.dim
    dim = 1 << n
    A, B, C = (_rand_element(rng, n, False) for _ in range(3))
    tr.record(al.wedge(al.wedge(A, B), C).coeffs, al.wedge(A, al.wedge(B, C)).coeffs, f"{tag}/wedge_assoc")
    v, w = _rand_vector_elem(rng, n), _rand_vector_elem(rng, n)
    tr.record((al.wedge(v, w) + al.wedge(w, v)).coeffs, np.zeros(dim), f"{tag}/wedge_antisym")
    tr.record(al.wedge(v, v).coeffs, np.zeros(dim), f"{tag}/wedge_nilpotent")

    Phi = _rand_element(rng, n, True)
    X = _rand_element(rng, n, False)
    left = al.left_contract(Phi, X)
    right = al.right_contract(Phi, X)
    for mask in range(dim):
        Psi = al.Multiform.blade(n, mask)
        tr.record(al.duality_pair(Psi, left), al.duality_pair(al.wedge(Phi, Psi), X), f"{tag}/lcontract_adjunction")
        tr.record(al.duality_pair(al.wedge(Psi, Phi), X), al.duality_pair(Psi, right), f"{tag}/rcontract_adjunction")
    # mirror case: multivector with multiform
    mleft = al.left_contract(X, Phi)
    for mask in range(dim):
        Y = al.Multivector.blade(n, mask)
        tr.record(al.duality_pair(mleft, Y), al.duality_pair(Phi, al.wedge(X, Y)), f"{tag}/lcontract_mirror")

    lam = al.VectorOperator(rng.uniform(-1.0, 1.0, (n, n)))
    mu = al.VectorOperator(rng.uniform(-1.0, 1.0, (n, n)))
    lext = al.outermorphism_extend(lam)
    tr.record(lext(al.wedge(A, B)).coeffs, al.wedge(lext(A), lext(B)).coeffs, f"{tag}/outermorphism_mult")
    gext = al.derivation_extend(lam)
    tr.record(
        gext(al.wedge(A, B)).coeffs,
        (al.wedge(gext(A), B) + al.wedge(A, gext(B))).coeffs,
        f"{tag}/derivation_rule",
    )
    # adjoint defining relation over all basis pairs == matrix transpose
    adj = al.duality_adjoint(lext)
    tr.record(adj.matrix, lext.matrix.T, f"{tag}/adjoint_defining")
    tr.record(al.duality_adjoint(adj).matrix, lext.matrix, f"{tag}/adjoint_involutive")
    tr.record(al.duality_pair(adj(Phi), X), al.duality_pair(Phi, lext(X)), f"{tag}/adjoint_pairing")
    # adjoint reverses composition order
    comp = adj.compose(al.duality_adjoint(al.outermorphism_extend(mu)))
    both = al.duality_adjoint(al.outermorphism_extend(al.VectorOperator(mu.matrix @ lam.matrix)))
    tr.record(comp.matrix, both.matrix, f"{tag}/adjoint_composition")


def _dcdo_structures(cfg, chart, rng):
    base = rand_gamma(rng, chart, cfg.degree)
    dfs = rand_deformed(rng, chart, cfg.degree)
    rel = rand_relative(rng, chart, cfg.degree)
    return (("cov", base), ("deform", dfs), ("frame", rel))


def trial_dcdo(cfg: SuiteConfig, chart: Chart, rng, tr: ResidualTracker, tag: str):
    """Field-level derivative axioms and duality compatibility for the
    base, deformed and frame-split derivative operators."""
    pts = chart.sample(rng, cfg.points)
    a = rand_vector_field(rng, chart, cfg.degree)
    b = rand_vector_field(rng, chart, cfg.degree)
    f = rand_poly(rng, chart, cfg.degree)
    X = rand_mv_field(rng, chart, cfg.degree, dual=False)
    Y = rand_mv_field(rng, chart, cfg.degree, dual=False)
    Phi = rand_mv_field(rng, chart, cfg.degree, dual=True)

    for name, s in _dcdo_structures(cfg, chart, rng):
        daX = s.deriv(a, X)
        daY = s.deriv(a, Y)
        tr.record_fields(s.deriv(a + b, X), daX + s.deriv(b, X), pts, f"{tag}/{name}/additive_a")
        tr.record_fields(s.deriv(a.scale(f), X), mv_scale(f, daX), pts, f"{tag}/{name}/homogeneous_a")
        tr.record_fields(s.deriv(a, X + Y), daX + daY, pts, f"{tag}/{name}/additive_field")
        tr.record_fields(
            s.deriv(a, mv_scale(f, X)),
            mv_scale(directional(a, f), X) + mv_scale(f, daX),
            pts,
            f"{tag}/{name}/module_leibniz",
        )
        tr.record_fields(
            s.deriv(a, mv_wedge(X, Y)),
            mv_wedge(daX, Y) + mv_wedge(X, daY),
            pts,
            f"{tag}/{name}/wedge_leibniz",
        )
        daPhi = s.deriv(a, Phi)
        tr.record_scalar_fields(
            directional(a, mv_pair(Phi, X)),
            mv_pair(daPhi, X) + mv_pair(Phi, daX),
            pts,
            f"{tag}/{name}/duality_leibniz",
        )


_LEIBNIZ_SHAPES = [(1, 0), (0, 1), (1, 1), (2, 1)]


def trial_leibniz(cfg: SuiteConfig, chart: Chart, rng, tr: ResidualTracker, tag: str, trial: int = 0):
    """Extensor-level Leibniz rules for the exterior, pairing and both
    contracted products, plus linearity/tensoriality of the derivative."""
    pts = chart.sample(rng, cfg.points)
    s = rand_gamma(rng, chart, cfg.degree)
    a = rand_vector_field(rng, chart, cfg.degree)
    b = rand_vector_field(rng, chart, cfg.degree)
    f = rand_poly(rng, chart, cfg.degree)

    k, l = _LEIBNIZ_SHAPES[trial % len(_LEIBNIZ_SHAPES)]
    sig_t = rand_signature(rng, chart.n, k=k, l=l, dual_output=False)
    sig_t_dual = rand_signature(rng, chart.n, k=min(k, 1), l=l, dual_output=True)
    sig_s = rand_signature(rng, chart.n, k=1, l=0, dual_output=False)
    tau = rand_extensor(rng, chart, sig_t, cfg.degree)
    ups = rand_extensor(rng, chart, sig_t_dual, cfg.degree)
    sg = rand_extensor(rng, chart, sig_s, cfg.degree)
    sg_dual = rand_extensor(rng, chart, rand_signature(rng, chart.n, k=1, l=0, dual_output=True), cfg.degree)

    def dv(t):
        return cov_deriv_extensor(s, a, t)

    dtau = dv(tau)
    dups = dv(ups)
    dsg = dv(sg)
    dsg_dual = dv(sg_dual)

    # linearity in the direction and in the extensor argument
    args_t = rand_args(rng, chart, sig_t, cfg.degree)
    tr.record_extensors(
        cov_deriv_extensor(s, a + b, tau), dtau + cov_deriv_extensor(s, b, tau), args_t, pts, f"{tag}/additive_a"
    )
    tr.record_extensors(cov_deriv_extensor(s, a.scale(f), tau), dtau.scale(f), args_t, pts, f"{tag}/homogeneous_a")
    tau2 = rand_extensor(rng, chart, sig_t, cfg.degree)
    tr.record_extensors(dv(tau + tau2), dtau + dv(tau2), args_t, pts, f"{tag}/additive_ext")
    tr.record_extensors(
        dv(tau.scale(f)), tau.scale(directional(a, f)) + dtau.scale(f), args_t, pts, f"{tag}/module_leibniz"
    )

    # wedge Leibniz (same-side outputs)
    prod = wedge_ext(tau, sg)
    args_w = rand_args(rng, chart, prod.signature, cfg.degree)
    tr.record_extensors(dv(prod), wedge_ext(dtau, sg) + wedge_ext(tau, dsg), args_w, pts, f"{tag}/wedge")

    # pairing Leibniz (opposite-side outputs)
    pair = pairing_ext(ups, sg)
    args_p = rand_args(rng, chart, pair.signature, cfg.degree)
    tr.record_extensors(dv(pair), pairing_ext(dups, sg) + pairing_ext(ups, dsg), args_p, pts, f"{tag}/pairing")

    # contraction Leibniz, both products and both argument orders; the
    # four variants rotate across trials to bound per-trial cost
    variants = (
        ("lcontract_fm", lcontract_ext, ups, dups, sg, dsg),
        ("lcontract_mf", lcontract_ext, tau, dtau, sg_dual, dsg_dual),
        ("rcontract_fm", rcontract_ext, ups, dups, sg, dsg),
        ("rcontract_mf", rcontract_ext, tau, dtau, sg_dual, dsg_dual),
    )
    name, op, t1, dt1, t2, dt2 = variants[trial % len(variants)]
    contr = op(t1, t2)
    args_c = rand_args(rng, chart, contr.signature, cfg.degree)
    tr.record_extensors(dv(contr), op(dt1, t2) + op(t1, dt2), args_c, pts, f"{tag}/{name}")

    # tensoriality: materialized derivative vs direct evaluation, and
    # S(U)-homogeneity in each argument slot
    direct = cov_deriv_apply(s, a, tau, args_t)
    tr.record_fields(dtau(*args_t), direct, pts, f"{tag}/tensorial_direct")
    scaled = (mv_scale(f, args_t[0]),) + args_t[1:]
    tr.record_fields(dtau(*scaled), mv_scale(f, dtau(*args_t)), pts, f"{tag}/tensorial_scale")


_ADJOINT_KINDS = (
    (False, False),
    (False, True),
    (True, False),
    (True, True),
)


def trial_adjoint(cfg: SuiteConfig, chart: Chart, rng, tr: ResidualTracker, tag: str):
    """Commutation of the duality adjoint with the covariant derivative for
    all four one-variable extensor kinds, plus involutivity."""
    pts = chart.sample(rng, cfg.points)
    s = rand_gamma(rng, chart, cfg.degree)
    a = rand_vector_field(rng, chart, cfg.degree)
    for slot_dual, out_dual in _ADJOINT_KINDS:
        sig = Signature(
            () if slot_dual else (frozenset(range(chart.n + 1)),),
            (frozenset(range(chart.n + 1)),) if slot_dual else (),
            out_dual,
            frozenset(range(chart.n + 1)),
        )
        tau = rand_extensor(rng, chart, sig, cfg.degree)
        adj = adjoint_ext(tau)
        args = rand_args(rng, chart, adj.signature, cfg.degree)
        kind = f"{'fm'[slot_dual]}to{'fm'[out_dual]}"
        tr.record_extensors(
            adjoint_ext(cov_deriv_extensor(s, a, tau)),
            cov_deriv_extensor(s, a, adj),
            args,
            pts,
            f"{tag}/commute_{kind}",
        )
        args_t = rand_args(rng, chart, sig, cfg.degree)
        tr.record_extensors(adjoint_ext(adj), tau, args_t, pts, f"{tag}/involutive_{kind}")


def trial_deform(cfg: SuiteConfig, chart: Chart, rng, tr: ResidualTracker, tag: str, trial: int = 0):
    """Deformation equivalence: the covariant-derivative formula under the
    deformed derivative against the conjugated action, on both output
    sides; plus the deformed-coefficient cross-check at field level."""
    pts = chart.sample(rng, cfg.points)
    d = rand_deformed(rng, chart, cfg.degree)
    a = rand_vector_field(rng, chart, cfg.degree)

    k, l = _LEIBNIZ_SHAPES[trial % len(_LEIBNIZ_SHAPES)]
    sig_mv = rand_signature(rng, chart.n, k=k, l=l, dual_output=False)
    sig_mf = rand_signature(rng, chart.n, k=min(k, 1), l=l, dual_output=True)
    for name, sig in (("mv", sig_mv), ("mf", sig_mf)):
        tau = rand_extensor(rng, chart, sig, cfg.degree)
        args = rand_args(rng, chart, sig, cfg.degree)
        tr.record_extensors(
            deformed_cov_deriv_ext(d, a, tau, path=1),
            deformed_cov_deriv_ext(d, a, tau, path=2),
            args,
            pts,
            f"{tag}/paths_{name}",
        )

    # conjugation formula vs coefficients extracted from the deformed
    # derivative of the coordinate frame
    coeff = d.coefficient_structure()
    X = rand_mv_field(rng, chart, cfg.degree, dual=False)
    tr.record_fields(d.deriv(a, X), coeff.deriv(a, X), pts, f"{tag}/coefficient_crosscheck")


def trial_split(cfg: SuiteConfig, chart: Chart, rng, tr: ResidualTracker, tag: str, trial: int = 0):
    """Frame-split theorem: the residual extensor field vanishes for both
    multivector-valued and multiform-valued extensor fields."""
    pts = chart.sample(rng, cfg.points)
    r = rand_relative(rng, chart, cfg.degree)
    a = rand_vector_field(rng, chart, cfg.degree)
    shapes = [(1, 0), (0, 1), (1, 1)]
    k, l = shapes[trial % len(shapes)]
    for name, dual in (("mv", False), ("mf", True)):
        sig = rand_signature(rng, chart.n, k=k, l=l, dual_output=dual)
        tau = rand_extensor(rng, chart, sig, cfg.degree)
        args = rand_args(rng, chart, sig, cfg.degree)
        res = split_identity(r, a, tau)(*args)
        for idx, p in enumerate(pts):
            tr.record(res.vals(p), np.zeros(chart.dim), f"{tag}/residual_{name}@pt{idx}")


_TRIALS = {
    "algebra": trial_algebra,
    "dcdo": trial_dcdo,
    "leibniz": trial_leibniz,
    "adjoint": trial_adjoint,
    "deform": trial_deform,
    "split": trial_split,
}

_TAKES_TRIAL = {"leibniz", "deform", "split"}


# ---------------------------------------------------------------------------
# suite runner and reports
# ---------------------------------------------------------------------------


@dataclass
class SuiteResult:
    name: str
    trials: int
    max_rel: float
    max_abs: float
    worst: str
    retries: int
    retry_exhausted: int
    passed: bool

    def as_dict(self):
        return {
            "name": self.name,
            "trials": self.trials,
            "max_relative_residual": self.max_rel,
            "max_absolute_residual": self.max_abs,
            "worst_instance": self.worst,
            "retries": self.retries,
            "retry_exhausted": self.retry_exhausted,
            "passed": self.passed,
        }


@dataclass
class IdentityReport:
    config: dict
    suites: list
    elapsed_s: float
    version: str = __version__

    @property
    def all_passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def as_dict(self):
        return {
            "version": self.version,
            "config": self.config,
            "suites": [s.as_dict() for s in self.suites],
            "all_passed": self.all_passed,
            "elapsed_s": self.elapsed_s,
        }


def run_one_suite(cfg: SuiteConfig, name: str) -> SuiteResult:
    chart = Chart(cfg.dim)
    tr = ResidualTracker()
    fn = _TRIALS[name]
    retries = 0
    exhausted = 0
    for trial in range(cfg.trials):
        for retry in range(MAX_RETRIES + 1):
            rng = trial_rng(cfg, name, trial, retry)
            tag = f"{name}/seed{cfg.seed}/trial{trial}" + (f"/retry{retry}" if retry else "")
            try:
                if name in _TAKES_TRIAL:
                    fn(cfg, chart, rng, tr, tag, trial)
                else:
                    fn(cfg, chart, rng, tr, tag)
                break
            except np.linalg.LinAlgError:
                retries += 1
                if retry == MAX_RETRIES:
                    exhausted += 1
    passed = tr.max_rel <= cfg.tol and exhausted == 0
    return SuiteResult(name, cfg.trials, tr.max_rel, tr.max_abs, tr.worst, retries, exhausted, passed)


def run_suite(cfg: SuiteConfig) -> IdentityReport:
    cfg.validate()
    start = time.monotonic()
    results = [run_one_suite(cfg, name) for name in SUITE_NAMES if name in cfg.suites]
    elapsed = time.monotonic() - start
    config_echo = {
        "dim": cfg.dim,
        "seed": cfg.seed,
        "degree": cfg.degree,
        "trials": cfg.trials,
        "tol": cfg.tol,
        "suites": [s for s in SUITE_NAMES if s in cfg.suites],
        "points": cfg.points,
    }
    return IdentityReport(config_echo, results, elapsed)


def emit_report(report: IdentityReport, fmt: str) -> str:
    """Render a report as machine-parsable JSON or line-per-suite text."""
    if fmt == "json":
        return json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "text":
        lines = [f"extensorfields {report.version}  dim={report.config['dim']} seed={report.config['seed']}"]
        for s in report.suites:
            status = "PASS" if s.passed else "FAIL"
            lines.append(
                f"{status}  {s.name:<8} trials={s.trials} max_rel={s.max_rel:.3e} "
                f"max_abs={s.max_abs:.3e} worst={s.worst or '-'} retries={s.retries}"
            )
        lines.append(f"overall: {'PASS' if report.all_passed else 'FAIL'} ({report.elapsed_s:.2f}s)")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r} (expected 'json' or 'text')")
