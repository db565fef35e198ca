"""End-to-end invariant generation pipelines.

Numeric pipeline: execute the loop exactly, build the vanishing-ideal
basis of the samples, keep candidates within the degree bound, and
verify polynomial-scale consecution per transition.

Symbolic pipeline: instantiate the parameters with random rationals,
run the numeric pipeline per instantiation, align the verified
invariants across instantiations by support and leading monomial, and
recover each coefficient as a rational function of the parameters.  The
while-guard is suspended during symbolic sampling by default (branch
conditions still apply), because parameter instantiations are generic
rationals for which the guard rarely delimits anything meaningful.
"""

from __future__ import annotations

import hashlib
import random
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from loopinv.divisibility import DEFAULT_W_SIZE, filter_and_verify
from loopinv.executor import ExecutionConfig, collect_samples
from loopinv.frontend import LoopProgram, to_transition_system
from loopinv.polyring import (
    GRLEX, Polynomial, Rational, TermOrder, clear_content, rational, render,
    sign_normalize,
)
from loopinv.ratinterp import (
    CoefficientBlackBox, InterpolationError, RationalFunction,
    clear_denominators, interpolate_rational,
)
from loopinv.vanishing import bounded_relations, buchberger_moeller

# degenerate instantiations are common for branchy programs (early
# iterates can sit on a low-dimensional slice), so budgets stay generous
PROBE_RETRY_CAP = 60
PROBE_FAILURE_BUDGET = 200


class InvariantReport:
    __slots__ = ("invariants", "min_degree", "degree_bound", "candidates_total",
                 "rejected_stage1", "rejected_stage2", "sample_count",
                 "shortfall", "nonexistence_note")

    def __init__(self, invariants, min_degree, degree_bound, candidates_total,
                 rejected_stage1, rejected_stage2, sample_count, shortfall,
                 nonexistence_note=None):
        self.invariants = invariants          # list of (Polynomial, [q per transition])
        self.min_degree = min_degree
        self.degree_bound = degree_bound
        self.candidates_total = candidates_total
        self.rejected_stage1 = rejected_stage1
        self.rejected_stage2 = rejected_stage2
        self.sample_count = sample_count
        self.shortfall = shortfall
        self.nonexistence_note = nonexistence_note


class ParametricInvariantReport:
    __slots__ = ("invariants", "min_degree", "degree_bound", "candidates_total",
                 "rejected_stage1", "rejected_stage2", "sample_count",
                 "shortfall", "instantiations", "nonexistence_note",
                 "reference_instantiation")

    def __init__(self, invariants, min_degree, degree_bound, candidates_total,
                 rejected_stage1, rejected_stage2, sample_count, shortfall,
                 instantiations, nonexistence_note=None,
                 reference_instantiation=None):
        self.invariants = invariants          # polynomials over vars + params
        self.min_degree = min_degree
        self.degree_bound = degree_bound
        self.candidates_total = candidates_total
        self.rejected_stage1 = rejected_stage1
        self.rejected_stage2 = rejected_stage2
        self.sample_count = sample_count
        self.shortfall = shortfall
        self.instantiations = instantiations
        self.nonexistence_note = nonexistence_note
        # param point whose verified invariants anchored the alignment
        self.reference_instantiation = reference_instantiation


def _derived_seed(seed: int, tag: str) -> int:
    digest = hashlib.sha256(f"{seed}:{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _nonexistence(min_degree, e) -> dict:
    return {
        "min_vanishing_degree": min_degree,
        "degree_bound": e,
        "claim": (f"every polynomial vanishing on the samples has degree >= "
                  f"{min_degree}, so no invariant of lower degree exists; "
                  f"no candidate of degree <= {e} passed verification"),
    }


def _normalize_report_poly(f: Polynomial, order: TermOrder) -> Polynomial:
    return sign_normalize(clear_content(f), order)


def trajectory(p: LoopProgram, e: int, point: Tuple[Rational, ...] = (),
               *, ignore_guard: bool = False,
               max_steps: Optional[int] = None):
    """The exact sample set a pipeline run draws, for trace dumps."""
    ts = to_transition_system(p)
    init = [p.init[v].evaluate(tuple(point)) for v in ts.V]
    n = len(ts.V)
    target = comb(n + e, n)
    steps = max_steps if max_steps is not None else 10 * target + 100
    return collect_samples(ts, init, ExecutionConfig(target, steps, ignore_guard))


def invgen_numeric(p: LoopProgram, e: int, order: TermOrder = GRLEX,
                   seed: int = 0, *, W_size: int = DEFAULT_W_SIZE,
                   ignore_guard: bool = False,
                   max_steps: Optional[int] = None,
                   stage1_only: bool = False) -> InvariantReport:
    if p.params:
        raise ValueError("program has symbolic parameters; use invgen_symbolic")
    if e < 1:
        raise ValueError("degree bound must be at least 1")
    ts = to_transition_system(p)
    init = [p.init[v].evaluate(()) for v in ts.V]
    return _numeric_run(ts, init, e, order, seed, W_size, ignore_guard,
                        max_steps, stage1_only)


def _numeric_run(ts, init, e, order, seed, W_size, ignore_guard, max_steps,
                 stage1_only=False):
    n = len(ts.V)
    target = comb(n + e, n)
    steps = max_steps if max_steps is not None else 10 * target + 100
    pts = collect_samples(ts, init, ExecutionConfig(target, steps, ignore_guard))
    vb = buchberger_moeller(pts, order=order, variables=ts.V, coeff_degree_cap=e)
    candidates = [f for f in vb.basis if f.total_degree() <= e]
    updates = [tr.update for tr in ts.transitions]
    verified, r1, r2 = filter_and_verify(
        candidates, updates, random.Random(_derived_seed(seed, "filter")),
        W_size, stage1_only=stage1_only)
    invariants = []
    for eta, quotients in verified:
        out = _normalize_report_poly(eta, order)
        assert out.evaluate(pts.points[0]) == 0
        invariants.append((out, quotients))
    note = None if invariants else _nonexistence(vb.min_degree, e)
    return InvariantReport(invariants, vb.min_degree, e, vb.basis_size,
                           len(r1), len(r2), len(pts.points), pts.shortfall,
                           note)


# --- symbolic pipeline ------------------------------------------------

class _ProbeRunner:
    """Memoized numeric runs at parameter instantiations.

    Every coefficient's interpolation walks the same point sequence, so
    one loop execution per instantiation serves them all.  A probe
    yields the verified invariants in T1-normalized form: scaled so the
    minimal support monomial has coefficient 1.
    """

    def __init__(self, p: LoopProgram, ts, e, order, seed, W_size,
                 ignore_guard, max_steps, stage1_only=False):
        self.p = p
        self.ts = ts
        self.e = e
        self.order = order
        self.seed = seed
        self.W_size = W_size
        self.ignore_guard = ignore_guard
        self.max_steps = max_steps
        self.stage1_only = stage1_only
        self.cache: Dict[Tuple[Rational, ...], Optional[dict]] = {}
        self.reference_report: Optional[InvariantReport] = None

    def _point_tag(self, point) -> str:
        return ",".join(str(c) for c in point)

    def probe(self, point: Tuple[Rational, ...]) -> Optional[dict]:
        if point in self.cache:
            return self.cache[point]
        full = self.reference_report is None
        result = self._run(point, full)
        self.cache[point] = result
        return result

    def _run(self, point, full) -> Optional[dict]:
        ts = self.ts
        init = [self.p.init[v].evaluate(point) for v in ts.V]
        n = len(ts.V)
        target = comb(n + self.e, n)
        steps = (self.max_steps if self.max_steps is not None
                 else 10 * target + 100)
        pts = collect_samples(ts, init,
                              ExecutionConfig(target, steps, self.ignore_guard))
        if pts.shortfall:
            return None
        run_seed = _derived_seed(self.seed, "probe:" + self._point_tag(point))
        updates = [tr.update for tr in ts.transitions]
        if full:
            vb = buchberger_moeller(pts, order=self.order, variables=ts.V,
                                    coeff_degree_cap=self.e)
            candidates = [f for f in vb.basis if f.total_degree() <= self.e]
        else:
            # later probes only need the bounded-degree relations; the
            # full border walk is reference-probe work
            candidates = bounded_relations(pts, self.e, order=self.order,
                                           variables=ts.V)
        verified, r1, r2 = filter_and_verify(
            candidates, updates, random.Random(run_seed), self.W_size,
            stage1_only=self.stage1_only)
        if full:
            invariants = [(_normalize_report_poly(eta, self.order), q)
                          for eta, q in verified]
            note = None if invariants else _nonexistence(vb.min_degree, self.e)
            self.reference_report = InvariantReport(
                invariants, vb.min_degree, self.e, vb.basis_size,
                len(r1), len(r2), len(pts.points), pts.shortfall, note)
        tracks = {}
        for eta, _ in verified:
            t1 = min(eta.terms, key=self.order.key)
            scaled = eta.scale(1 / eta.terms[t1])
            key = (frozenset(scaled.terms), eta.leading_monomial(self.order))
            tracks[key] = dict(scaled.terms)
        return tracks


def invgen_symbolic(p: LoopProgram, e: int, order: TermOrder = GRLEX,
                    seed: int = 0,
                    interp_cfg: Optional[Tuple[Sequence[int], Sequence[int]]] = None,
                    *, W_size: int = DEFAULT_W_SIZE,
                    ignore_guard: Optional[bool] = None,
                    max_steps: Optional[int] = None,
                    stage1_only: bool = False) -> ParametricInvariantReport:
    if not p.params:
        raise ValueError("program has no parameters; use invgen_numeric")
    if e < 1:
        raise ValueError("degree bound must be at least 1")
    m = len(p.params)
    if interp_cfg is not None:
        num_bounds, den_bounds = tuple(interp_cfg[0]), tuple(interp_cfg[1])
        if len(num_bounds) != m or len(den_bounds) != m:
            raise ValueError("interpolation bounds must list one entry per parameter")
        bounds: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = (num_bounds, den_bounds)
    else:
        bounds = None
    suspend_guard = True if ignore_guard is None else ignore_guard
    ts = to_transition_system(p)
    runner = _ProbeRunner(p, ts, e, order, seed, W_size, suspend_guard,
                          max_steps, stage1_only)
    point_seed = _derived_seed(seed, "points")

    # the reference instantiation fixes the aligned supports
    ref_rng = random.Random(point_seed)
    reference = None
    ref_point = None
    for _ in range(PROBE_RETRY_CAP):
        pt = tuple(rational(ref_rng.randint(1, 1000), ref_rng.randint(1, 1000))
                   for _ in range(m))
        reference = runner.probe(pt)
        if reference:
            ref_point = pt
            break
    if not reference:
        note = {"degree_bound": e,
                "claim": ("no instantiation produced a verified invariant at "
                          f"this degree bound within {PROBE_RETRY_CAP} tries")}
        return ParametricInvariantReport([], None, e, 0, 0, 0, 0, False,
                                         len(runner.cache), note)
    ref_report = runner.reference_report

    invariants = []
    failures: List[str] = []
    variables = ts.V
    for key in sorted(reference,
                      key=lambda k: (k[1], sorted(k[0]))):
        support, lm = key
        template_monos = sorted(support, key=order.key)
        coeffs: List[RationalFunction] = []
        try:
            for i, mono in enumerate(template_monos):
                if i == 0:
                    one = Polynomial.constant(p.params, rational(1))
                    coeffs.append(RationalFunction(one, one))
                    continue
                bb = CoefficientBlackBox(
                    _coefficient_reader(runner, key, mono),
                    label=f"coefficient of {_mono_text(variables, mono)}")
                coeffs.append(interpolate_rational(
                    bb, m, degree_bounds=bounds,
                    rng=random.Random(point_seed),
                    failure_budget=PROBE_FAILURE_BUDGET,
                    params=p.params))
        except InterpolationError as err:
            failures.append(str(err))
            continue
        template = [Polynomial.monomial(variables, mn, rational(1))
                    for mn in template_monos]
        cleared = clear_denominators(template, coeffs)
        checked = _verify_parametric(cleared, p, ts, e, seed, W_size,
                                     suspend_guard, max_steps, stage1_only)
        if checked is None:
            failures.append(f"consecution failed for {render(cleared)}")
            continue
        invariants.append(checked)

    note = None
    if not invariants:
        note = {"degree_bound": e,
                "claim": "no parametric invariant found at this degree bound",
                "failures": failures}
    return ParametricInvariantReport(
        invariants, ref_report.min_degree, e, ref_report.candidates_total,
        ref_report.rejected_stage1, ref_report.rejected_stage2,
        ref_report.sample_count, ref_report.shortfall, len(runner.cache), note,
        ref_point)


def _coefficient_reader(runner: _ProbeRunner, key, mono):
    def evaluator(point):
        tracks = runner.probe(point)
        if not tracks:
            return None
        coeffs = tracks.get(key)
        if coeffs is None:
            return None      # support misaligned at this instantiation
        return coeffs.get(mono)
    return evaluator


def _mono_text(variables, mono) -> str:
    return render(Polynomial.monomial(variables, mono, rational(1)))


def _lift_to(f: Polynomial, joint: Tuple[str, ...]) -> Polynomial:
    slots = [joint.index(v) for v in f.vars]
    out = Polynomial.zero(joint)
    for mono, c in f.terms.items():
        big = [0] * len(joint)
        for s, a in zip(slots, mono):
            big[s] = a
        out = out.add(Polynomial.monomial(joint, tuple(big), c))
    return out


def _verify_parametric(cleared, p, ts, e, seed, W_size, suspend_guard,
                       max_steps, stage1_only=False):
    """Exact consecution with inert params, plus fresh-trajectory vanishing."""
    joint = ts.V + p.params
    extended = []
    for tr in ts.transitions:
        update = {v: _lift_to(tr.update[v], joint) for v in ts.V}
        for u in p.params:
            update[u] = Polynomial.variable(joint, u)
        extended.append(update)
    verified, _, _ = filter_and_verify(
        [cleared], extended, random.Random(_derived_seed(seed, "parametric")),
        W_size, stage1_only=stage1_only)
    if not verified:
        return None
    _, quotients = verified[0]
    n = len(ts.V)
    target = comb(n + e, n)
    steps = max_steps if max_steps is not None else 10 * target + 100
    fresh_rng = random.Random(_derived_seed(seed, "fresh"))
    for _ in range(2):
        point = tuple(rational(fresh_rng.randint(1, 1000),
                               fresh_rng.randint(1, 1000))
                      for _ in p.params)
        init = [p.init[v].evaluate(point) for v in ts.V]
        pts = collect_samples(ts, init,
                              ExecutionConfig(target, steps, suspend_guard))
        for state in pts.points:
            if cleared.evaluate(tuple(state) + point) != 0:
                return None
    return cleared, quotients
