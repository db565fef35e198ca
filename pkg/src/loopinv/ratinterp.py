"""Recover rational-function coefficients from black-box evaluations.

A black box hands back the value of one unknown coefficient at chosen
parameter points.  Fitting num/den with bounded per-variable degrees is
a homogeneous linear problem: at each sampled point u with value c,

    c * den(u) - num(u) = 0.

An exact nullspace vector of the stacked system proposes the pair; the
proposal must then agree with the black box at fresh random points, and
any disagreement doubles the degree bounds and retries up to a cap.
"""

from __future__ import annotations

import random
from itertools import product as _cartesian
from typing import Callable, List, Optional, Sequence, Tuple

from loopinv.polyring import (
    GRLEX, Polynomial, Rational, clear_content, divide, rational, render,
    sign_normalize,
)

DEFAULT_DEGREE_BOUND = 2
BOUND_CAP = 32
FRESH_CHECKS = 3


class InterpolationError(RuntimeError):
    pass


class RationalFunction:
    """num/den over the parameter ring, denominator monic under grlex."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial):
        if den.is_zero():
            raise ZeroDivisionError("denominator is the zero polynomial")
        if num.vars != den.vars:
            raise ValueError("numerator and denominator rings differ")
        scale = 1 / den.leading_coefficient(GRLEX)
        self.num = num.scale(scale)
        self.den = den.scale(scale)

    def evaluate(self, point: Sequence[Rational]) -> Rational:
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        return self.num.evaluate(point) / d

    def is_polynomial(self) -> bool:
        return self.den.total_degree() == 0

    def __eq__(self, other) -> bool:
        return (isinstance(other, RationalFunction)
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalFunction(({render(self.num)}) / ({render(self.den)}))"


class CoefficientBlackBox:
    """One coefficient as a function of the parameters.

    evaluator returns the coefficient's value at a parameter point, or
    None when that instantiation failed (degenerate run, misaligned
    support); label names the coefficient in error messages.
    """

    __slots__ = ("evaluator", "label")

    def __init__(self, evaluator: Callable[[Tuple[Rational, ...]], Optional[Rational]],
                 label: str = "coefficient"):
        self.evaluator = evaluator
        self.label = label


def _box_monomials(bounds: Sequence[int]) -> List[Tuple[int, ...]]:
    ranges = [range(b + 1) for b in bounds]
    return sorted(_cartesian(*ranges), key=lambda m: (sum(m), m))


def _exact_nullspace(rows: List[List[Rational]], ncols: int) -> List[List[Rational]]:
    mat = [list(r) for r in rows]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [rational(0)] * ncols
        v[fc] = rational(1)
        for i, pc in enumerate(pivots):
            v[pc] = -mat[i][fc]
        basis.append(v)
    return basis


def _random_point(m: int, rng: random.Random) -> Tuple[Rational, ...]:
    return tuple(rational(rng.randint(1, 1000), rng.randint(1, 1000))
                 for _ in range(m))


class _SampleStream:
    """Distinct param points with black-box values, drawn on demand."""

    def __init__(self, bb: CoefficientBlackBox, m: int, rng: random.Random,
                 failure_budget: int):
        self.bb = bb
        self.m = m
        self.rng = rng
        self.failure_budget = failure_budget
        self.samples: List[Tuple[Tuple[Rational, ...], Rational]] = []
        self.seen = set()
        self.failures = 0

    def take(self, count: int) -> List[Tuple[Tuple[Rational, ...], Rational]]:
        while len(self.samples) < count:
            pt = _random_point(self.m, self.rng)
            if pt in self.seen:
                continue
            self.seen.add(pt)
            val = self.bb.evaluator(pt)
            if val is None:
                self.failures += 1
                if self.failures > self.failure_budget:
                    raise InterpolationError(
                        f"{self.bb.label}: black-box failures exceeded "
                        f"budget of {self.failure_budget}")
                continue
            self.samples.append((pt, val))
        return self.samples[:count]


def interpolate_rational(
    bb: CoefficientBlackBox,
    m: int,
    degree_bounds: Optional[Tuple[Sequence[int], Sequence[int]]] = None,
    rng: Optional[random.Random] = None,
    fresh_checks: int = FRESH_CHECKS,
    failure_budget: int = 50,
    params: Optional[Sequence[str]] = None,
) -> RationalFunction:
    if m < 1:
        raise ValueError("need at least one parameter")
    rng = rng or random.Random(0)
    if degree_bounds is None:
        num_bounds: Tuple[int, ...] = (DEFAULT_DEGREE_BOUND,) * m
        den_bounds: Tuple[int, ...] = (DEFAULT_DEGREE_BOUND,) * m
    else:
        num_bounds, den_bounds = (tuple(degree_bounds[0]), tuple(degree_bounds[1]))
        if len(num_bounds) != m or len(den_bounds) != m:
            raise ValueError("degree bounds must list one entry per parameter")
    if params is None:
        params = tuple(f"u{i + 1}" for i in range(m))
    else:
        params = tuple(params)
        if len(params) != m:
            raise ValueError("params must list one name per parameter")
    stream = _SampleStream(bb, m, rng, failure_budget)

    while True:
        status, rf = _fit_at_bounds(stream, params, num_bounds, den_bounds,
                                    fresh_checks)
        if status == "ok":
            return rf
        if max(max(num_bounds), max(den_bounds)) >= BOUND_CAP:
            if status == "nofit":
                raise InterpolationError(
                    f"{bb.label}: samples admit no rational function within "
                    f"degree bound cap {BOUND_CAP}; degenerate instantiations "
                    "suspected")
            raise InterpolationError(
                f"{bb.label}: fresh-point verification kept failing up to "
                f"degree bound cap {BOUND_CAP}")
        num_bounds = tuple(min(2 * b if b else 1, BOUND_CAP) for b in num_bounds)
        den_bounds = tuple(min(2 * b if b else 1, BOUND_CAP) for b in den_bounds)


def _fit_at_bounds(stream, params, num_bounds, den_bounds, fresh_checks):
    num_monos = _box_monomials(num_bounds)
    den_monos = _box_monomials(den_bounds)
    unknowns = len(num_monos) + len(den_monos)
    fit = stream.take(unknowns + 2)
    rows = []
    for pt, val in fit:
        row = [-_mono_at(mn, pt) for mn in num_monos]
        row.extend(val * _mono_at(md, pt) for md in den_monos)
        rows.append(row)
    basis = _exact_nullspace(rows, unknowns)
    if not basis:
        # the oversampled rows admit nothing at these bounds
        return "nofit", None
    for vec in basis:
        den = _from_coeffs(params, den_monos, vec[len(num_monos):])
        if den.is_zero():
            continue
        num = _from_coeffs(params, num_monos, vec[:len(num_monos)])
        rf = RationalFunction(num, den)
        if _agrees(rf, stream, len(fit), fresh_checks):
            return "ok", rf
    return "mismatch", None


def _agrees(rf, stream, fit_count, fresh_checks) -> bool:
    # solved points come back for free; the fresh tail is the real test
    for pt, val in stream.take(fit_count + fresh_checks):
        if rf.den.evaluate(pt) == 0:
            return False
        if rf.evaluate(pt) != val:
            return False
    return True


def _mono_at(mono, pt) -> Rational:
    out = rational(1)
    for b, a in zip(pt, mono):
        if a:
            out *= b ** a
    return out


def _from_coeffs(params, monos, coeffs) -> Polynomial:
    f = Polynomial.zero(params)
    for mono, c in zip(monos, coeffs):
        if c != 0:
            f = f.add(Polynomial.monomial(params, mono, c))
    return f


def clear_denominators(template: Sequence[Polynomial],
                       coeffs: Sequence[RationalFunction]) -> Polynomial:
    """Combine sum(coeffs[i] * template[i]) into one polynomial.

    Template entries live in the program-variable ring, coefficients in
    the parameter ring; the result ranges over vars then params, scaled
    by the denominators, content-reduced, grlex-lead sign positive.
    """
    if len(template) != len(coeffs):
        raise ValueError("template and coefficient lists differ in length")
    if not template:
        raise ValueError("empty template")
    variables = template[0].vars
    params = coeffs[0].num.vars
    joint = variables + params
    distinct: List[Polynomial] = []
    for rf in coeffs:
        if rf.den.total_degree() != 0 and rf.den not in distinct:
            distinct.append(rf.den)
    common = Polynomial.constant(params, rational(1))
    for d in distinct:
        common = common.mul(d)
    out = Polynomial.zero(joint)
    for mono_poly, rf in zip(template, coeffs):
        cofactor, rem = divide(common, rf.den, GRLEX)
        assert rem.is_zero()
        part = _lift(rf.num.mul(cofactor), joint).mul(_lift(mono_poly, joint))
        out = out.add(part)
    return sign_normalize(clear_content(out), GRLEX)


def _lift(f: Polynomial, joint: Tuple[str, ...]) -> Polynomial:
    slots = [joint.index(v) for v in f.vars]
    terms = {}
    for mono, c in f.terms.items():
        big = [0] * len(joint)
        for s, a in zip(slots, mono):
            big[s] = a
        terms[tuple(big)] = c
    out = Polynomial.zero(joint)
    for mono, c in terms.items():
        out = out.add(Polynomial.monomial(joint, mono, c))
    return out
