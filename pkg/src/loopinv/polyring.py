"""Sparse multivariate polynomial arithmetic over exact rationals.

Representation:

  * a monomial is a tuple of non-negative integer exponents, one slot per
    ring variable, e.g. (2, 1) for x^2*y in a ring declared as (x, y);
  * a polynomial is a Polynomial object holding the variable tuple and a
    dict mapping monomials to nonzero Rational coefficients (canonical
    sparse form: zero coefficients are never stored);
  * Rational is gmpy2.mpq when gmpy2 is importable, fractions.Fraction
    otherwise.  Both keep values reduced with a positive denominator.

Term order is graded lexicographic: total degree first, ties broken
lexicographically with the first declared variable greatest.  So in a ring
(x, y) we have y < x and x*y^2 < x^2*y.

Printed term order is different from the comparison order: the canonical
text rendering sorts terms descending by pure lexicographic precedence,
which reproduces the fixed golden layouts (degree-1 terms in the greatest
variable print before higher-degree terms in lesser variables).
"""

from __future__ import annotations

from typing import Dict, Iterable, Mapping, Sequence, Tuple

try:
    from gmpy2 import mpq as Rational
except ImportError:      # pure fallback, same reduced-form invariants
    from fractions import Fraction as Rational

Exponents = Tuple[int, ...]

LT, EQ, GT = -1, 0, 1

ZERO_DEGREE = float("-inf")   # sentinel; callers branch on is_zero first


def rational(num, den=1) -> Rational:
    """Build a reduced Rational from ints, strings, or Rationals."""
    if den == 1:
        return Rational(num)          # one-arg form also accepts "p/q" strings
    return Rational(num, den)


def grlex_key(m: Exponents):
    """Sort key realizing graded lex with the first variable greatest."""
    return (sum(m), m)


class TermOrder:
    """Monomial comparison strategy, exposed as a sort key on exponents."""

    __slots__ = ("name", "key")

    def __init__(self, name: str, key):
        self.name = name
        self.key = key

    def __repr__(self):
        return f"TermOrder({self.name})"


GRLEX = TermOrder("grlex", grlex_key)


def compare(m1: Exponents, m2: Exponents) -> int:
    """Graded-lex comparison; returns LT, EQ, or GT."""
    if len(m1) != len(m2):
        raise ValueError("ring mismatch: exponent vectors of unequal length")
    k1, k2 = grlex_key(m1), grlex_key(m2)
    return LT if k1 < k2 else (GT if k1 > k2 else EQ)


def monomial_mul(m1: Exponents, m2: Exponents) -> Exponents:
    return tuple(a + b for a, b in zip(m1, m2))


def monomial_divides(m1: Exponents, m2: Exponents) -> bool:
    """True iff m1 divides m2 componentwise."""
    return all(a <= b for a, b in zip(m1, m2))


def monomial_div(m1: Exponents, m2: Exponents) -> Exponents:
    """m1 / m2; caller guarantees divisibility."""
    return tuple(a - b for a, b in zip(m1, m2))


class Polynomial:
    """Immutable-by-convention sparse polynomial over a declared ring."""

    __slots__ = ("vars", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponents, Rational]):
        self.vars: Tuple[str, ...] = tuple(variables)
        n = len(self.vars)
        clean: Dict[Exponents, Rational] = {}
        for mono, coeff in terms.items():
            if len(mono) != n:
                raise ValueError("ring mismatch: monomial arity != variable count")
            c = Rational(coeff)
            if c != 0:
                clean[tuple(mono)] = c
        self.terms = clean

    # --- constructors -------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Polynomial":
        return cls(variables, {})

    @classmethod
    def constant(cls, variables: Sequence[str], c) -> "Polynomial":
        return cls(variables, {(0,) * len(tuple(variables)): Rational(c)})

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "Polynomial":
        variables = tuple(variables)
        i = variables.index(name)
        mono = tuple(1 if j == i else 0 for j in range(len(variables)))
        return cls(variables, {mono: Rational(1)})

    @classmethod
    def monomial(cls, variables: Sequence[str], mono: Exponents, coeff=1) -> "Polynomial":
        return cls(variables, {tuple(mono): Rational(coeff)})

    # --- predicates and views ----------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (isinstance(other, Polynomial)
                and self.vars == other.vars and self.terms == other.terms)

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Polynomial({render(self)!r})"

    def coefficient(self, mono: Exponents) -> Rational:
        return self.terms.get(tuple(mono), Rational(0))

    def support(self) -> Tuple[Exponents, ...]:
        """Monomials with nonzero coefficient, ascending grlex."""
        return tuple(sorted(self.terms, key=grlex_key))

    # --- ring operations ---------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.vars != other.vars:
            raise ValueError("ring mismatch: %r vs %r" % (self.vars, other.vars))

    def add(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, 0) + c
            if s == 0:
                out.pop(mono, None)
            else:
                out[mono] = s
        return Polynomial(self.vars, out)

    def negate(self) -> "Polynomial":
        return Polynomial(self.vars, {m: -c for m, c in self.terms.items()})

    def sub(self, other: "Polynomial") -> "Polynomial":
        return self.add(other.negate())

    def scale(self, c) -> "Polynomial":
        c = Rational(c)
        if c == 0:
            return Polynomial.zero(self.vars)
        return Polynomial(self.vars, {m: c * v for m, v in self.terms.items()})

    def mul(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out: Dict[Exponents, Rational] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = monomial_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return Polynomial(self.vars, out)

    def pow(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result.mul(base)
            base = base.mul(base) if k > 1 else base
            k >>= 1
        return result

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __neg__ = negate

    # --- evaluation and composition ----------------------------------

    def evaluate(self, point: Sequence) -> Rational:
        if len(point) != len(self.vars):
            raise ValueError("dimension mismatch")
        point = [Rational(c) for c in point]
        total = Rational(0)
        for mono, coeff in self.terms.items():
            v = coeff
            for x, e in zip(point, mono):
                if e:
                    v *= x ** e
            total += v
        return total

    def substitute(self, images: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Exact composition; every variable of self needs an image.

        All images must live in one common target ring.
        """
        target = None
        for name in self.vars:
            if name not in images:
                raise ValueError(f"no image for variable {name}")
            img = images[name]
            if target is None:
                target = img.vars
            elif img.vars != target:
                raise ValueError("images live in different rings")
        assert target is not None
        out = Polynomial.zero(target)
        # cache image powers; exponents repeat across terms
        powers: Dict[Tuple[str, int], Polynomial] = {}
        for mono, coeff in self.terms.items():
            term = Polynomial.constant(target, coeff)
            for name, e in zip(self.vars, mono):
                if e == 0:
                    continue
                key = (name, e)
                if key not in powers:
                    powers[key] = images[name].pow(e)
                term = term.mul(powers[key])
            out = out.add(term)
        return out

    # --- degrees, leading data, division -----------------------------

    def total_degree(self):
        if not self.terms:
            return ZERO_DEGREE
        return max(sum(m) for m in self.terms)

    def leading_monomial(self, order: TermOrder = GRLEX) -> Exponents:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=order.key)

    def leading_coefficient(self, order: TermOrder = GRLEX) -> Rational:
        return self.terms[self.leading_monomial(order)]

    def make_monic(self, order: TermOrder = GRLEX) -> "Polynomial":
        if not self.terms:
            raise ValueError("cannot normalize the zero polynomial")
        lc = self.leading_coefficient(order)
        return self if lc == 1 else self.scale(1 / Rational(lc))


def divide(f: Polynomial, g: Polynomial,
           order: TermOrder = GRLEX) -> Tuple[Polynomial, Polynomial]:
    """Single-divisor division: f = q*g + r, no term of r divisible by lm(g).

    Divisibility test for the callers is r.is_zero().
    """
    f._check(g)
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lm_g = g.leading_monomial(order)
    lc_g = g.terms[lm_g]
    q: Dict[Exponents, Rational] = {}
    r: Dict[Exponents, Rational] = {}
    work = dict(f.terms)
    # strip the order-largest remaining term each round; termination is the
    # usual well-ordering argument on the leading monomial
    while work:
        mono = max(work, key=order.key)
        coeff = work.pop(mono)
        if monomial_divides(lm_g, mono):
            qm = monomial_div(mono, lm_g)
            qc = coeff / lc_g
            q[qm] = q.get(qm, Rational(0)) + qc
            for m2, c2 in g.terms.items():
                if m2 == lm_g:
                    continue
                mm = monomial_mul(qm, m2)
                s = work.get(mm, Rational(0)) - qc * c2
                if s == 0:
                    work.pop(mm, None)
                else:
                    work[mm] = s
        else:
            r[mono] = coeff
    return Polynomial(f.vars, q), Polynomial(f.vars, r)


# --- canonical text rendering ----------------------------------------
#
# Terms print descending by pure lexicographic precedence (first declared
# variable greatest), which is what the golden layouts fix; the sign
# convention for normalized output elsewhere is grlex-leading-coefficient
# positive.  The two orders genuinely differ: grlex ranks 2*y^6 above x,
# the printed layout puts -12*x first.

def _coeff_str(c: Rational) -> str:
    return str(c)


def _mono_str(variables: Tuple[str, ...], mono: Exponents) -> str:
    parts = []
    for name, e in zip(variables, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def render(f: Polynomial) -> str:
    """Canonical text: "-12*x + 2*y^6 - 6*y^5 + 5*y^4 - y^2" layout."""
    if f.is_zero():
        return "0"
    out = []
    for mono in sorted(f.terms, key=lambda m: m, reverse=True):
        c = f.terms[mono]
        ms = _mono_str(f.vars, mono)
        neg = c < 0
        mag = -c if neg else c
        if not ms:
            body = _coeff_str(mag)
        elif mag == 1:
            body = ms
        else:
            body = f"{_coeff_str(mag)}*{ms}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(out)


def clear_content(f: Polynomial) -> Polynomial:
    """Scale by the positive rational that makes coefficients coprime integers.

    The grlex-leading coefficient keeps its sign.
    """
    if f.is_zero():
        return f
    from math import gcd
    lcm_den = 1
    for c in f.terms.values():
        d = int(c.denominator)
        lcm_den = lcm_den // gcd(lcm_den, d) * d
    nums = [int(c.numerator) * (lcm_den // int(c.denominator)) for c in f.terms.values()]
    g = 0
    for v in nums:
        g = gcd(g, abs(v))
    return f.scale(Rational(lcm_den, g))


def sign_normalize(f: Polynomial, order: TermOrder = GRLEX) -> Polynomial:
    """Flip sign if needed so the order-leading coefficient is positive."""
    if f.is_zero():
        return f
    return f.negate() if f.leading_coefficient(order) < 0 else f
