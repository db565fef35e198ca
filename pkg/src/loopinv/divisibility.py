"""Polynomial-scale consecution checks for invariant candidates.

A candidate eta passes for a transition with update map U when
eta(U(V)) = q(V) * eta(V) for some polynomial q.  Deciding that by
multivariate division alone is the expensive path, so candidates first
face a randomized one-variable shadow of the same question: restrict
both polynomials to a random line

    x1 -> Z,   xi -> Bi*Z - pi   (i >= 2)

and test univariate divisibility there.  Restriction is a ring morphism,
so divisibility survives it; non-divisibility on the line therefore
refutes divisibility upstairs, while a pass on the line can be a false
positive with probability that shrinks with the sample space W.  Exact
division then certifies the survivors and produces the quotients.
"""

from __future__ import annotations

import random
from typing import Dict, List, Sequence, Tuple

from loopinv.polyring import (
    GRLEX, ZERO_DEGREE, Polynomial, Rational, divide, rational,
)

DEFAULT_W_SIZE = 1 << 20


class UnivariatePolynomial:
    """Dense polynomial in Z; index = power of Z."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Sequence[Rational]):
        coeffs = list(coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients = tuple(coeffs)

    def is_zero(self) -> bool:
        return not self.coefficients

    def degree(self):
        if not self.coefficients:
            return ZERO_DEGREE
        return len(self.coefficients) - 1

    def mul(self, other: "UnivariatePolynomial") -> "UnivariatePolynomial":
        return UnivariatePolynomial(
            _convolve(self.coefficients, other.coefficients))

    def __eq__(self, other) -> bool:
        return (isinstance(other, UnivariatePolynomial)
                and self.coefficients == other.coefficients)

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"UnivariatePolynomial({list(self.coefficients)!r})"


def _convolve(a, b) -> List[Rational]:
    if not a or not b:
        return []
    out = [rational(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return out


class LineTransform:
    """Random line through which divisibility questions are shadowed.

    B and p each hold n-1 entries, for variables 2..n; the first
    variable becomes Z itself with no affine shift.
    """

    __slots__ = ("B", "p", "sample_space_size")

    def __init__(self, B: Sequence[Rational], p: Sequence[Rational],
                 sample_space_size: int):
        if len(B) != len(p):
            raise ValueError("B and p must have matching length")
        self.B = tuple(B)
        self.p = tuple(p)
        self.sample_space_size = sample_space_size


def random_line(n: int, rng: random.Random, W_size: int = DEFAULT_W_SIZE) -> LineTransform:
    """Draw B then p, each uniform over {1, ..., W_size}."""
    if n < 1:
        raise ValueError("need at least one variable")
    if W_size < 2:
        raise ValueError("sample space must have at least two elements")
    B = tuple(rational(rng.randint(1, W_size)) for _ in range(n - 1))
    p = tuple(rational(rng.randint(1, W_size)) for _ in range(n - 1))
    return LineTransform(B, p, W_size)


def to_univariate(f: Polynomial, t: LineTransform) -> UnivariatePolynomial:
    """Exact image of f under x1 -> Z, xi -> Bi*Z - pi."""
    n = len(f.vars)
    if n != len(t.B) + 1:
        raise ValueError("transform arity does not match polynomial")
    # images[i] is the dense form of variable i's replacement
    images = [(rational(0), rational(1))]
    images.extend((-t.p[i], t.B[i]) for i in range(n - 1))
    powers: Dict[Tuple[int, int], Tuple[Rational, ...]] = {}

    def image_power(i: int, a: int) -> Tuple[Rational, ...]:
        key = (i, a)
        got = powers.get(key)
        if got is None:
            if a == 0:
                got = (rational(1),)
            else:
                got = tuple(_convolve(image_power(i, a - 1), images[i]))
            powers[key] = got
        return got

    acc: List[Rational] = []
    for mono, coeff in f.terms.items():
        term = [coeff]
        for i, a in enumerate(mono):
            if a:
                term = _convolve(term, image_power(i, a))
        if len(term) > len(acc):
            acc.extend([rational(0)] * (len(term) - len(acc)))
        for k, c in enumerate(term):
            acc[k] += c
    return UnivariatePolynomial(acc)


def univariate_divides(ft: UnivariatePolynomial, gt: UnivariatePolynomial) -> bool:
    """True iff gt is an exact multiple of ft."""
    if ft.is_zero():
        raise ZeroDivisionError("divisor is the zero polynomial")
    rem = list(gt.coefficients)
    dft = len(ft.coefficients) - 1
    lead = ft.coefficients[-1]
    while len(rem) - 1 >= dft:
        factor = rem[-1] / lead
        shift = len(rem) - 1 - dft
        for k, c in enumerate(ft.coefficients):
            rem[shift + k] -= factor * c
        while rem and rem[-1] == 0:
            rem.pop()
    return not rem


def filter_and_verify(
    candidates: Sequence[Polynomial],
    transitions: Sequence[Dict[str, Polynomial]],
    rng: random.Random,
    W_size: int = DEFAULT_W_SIZE,
    *,
    stage1_only: bool = False,
):
    """Split candidates into (verified, rejected_univariate, rejected_multivariate).

    verified entries are (eta, quotients) with one quotient per
    transition and eta(U(V)) = q(V) * eta(V) an exact identity.  A fresh
    line is drawn per (candidate, transition) pair from the caller's
    seeded rng, so runs are reproducible.  All three lists preserve the
    candidates' input order.

    stage1_only skips the exact division entirely: survivors of the
    randomized filter are returned with quotients = None and no
    certificate.  Unsound by construction (false-positive probability is
    bounded, not zero); exists only behind an explicitly labeled flag.
    """
    if not transitions:
        raise ValueError("no transitions to check against")
    verified: List[Tuple[Polynomial, List[Polynomial]]] = []
    rejected_univariate: List[Polynomial] = []
    rejected_multivariate: List[Polynomial] = []
    for eta in candidates:
        if eta.is_zero():
            raise ValueError("zero candidate")
        if eta.total_degree() == 0:
            # BM on a non-empty sample set never emits one; a constant
            # scales only under q = const, which makes eta = 0 useless
            raise ValueError("constant candidate")
        substituted = [eta.substitute(update) for update in transitions]
        survived = True
        for eta_next in substituted:
            t = random_line(len(eta.vars), rng, W_size)
            ft = to_univariate(eta, t)
            if ft.is_zero():
                continue      # line lies inside eta's zero set; no verdict
            if not univariate_divides(ft, to_univariate(eta_next, t)):
                survived = False
                break
        if not survived:
            rejected_univariate.append(eta)
            continue
        if stage1_only:
            verified.append((eta, None))
            continue
        quotients: List[Polynomial] = []
        exact = True
        for eta_next in substituted:
            q, r = divide(eta_next, eta, GRLEX)
            if not r.is_zero():
                exact = False
                break
            quotients.append(q)
        if exact:
            verified.append((eta, quotients))
        else:
            rejected_multivariate.append(eta)
    return verified, rejected_univariate, rejected_multivariate
