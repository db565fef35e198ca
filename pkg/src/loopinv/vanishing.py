"""Vanishing ideal of a finite rational point set.

Given distinct points S in Q^n, compute the reduced Groebner basis of the
ideal of polynomials vanishing on S, together with the normal set (the
monomial basis of the quotient ring) and the minimum basis degree.

The classical method reduces monomial evaluation vectors one at a time by
exact rational elimination.  Rational arithmetic makes that elimination
the bottleneck: intermediate coefficient heights blow up long before the
output does.  This implementation runs the same elimination modulo a
batch of 30-bit primes instead, lifts the nullspace vectors by CRT and
rational reconstruction, and then certifies the lifted basis with exact
arithmetic.  The certificate is airtight:

  * over a prime field the matrix rank can only drop, never rise, so the
    modular nullspace dimension is an upper bound on the exact one;
  * each lifted vector is checked, exactly, to vanish on every point, so
    the verified vectors are exact nullspace members, and they are
    linearly independent because each carries leading coefficient 1 at a
    distinct free column and zeros at the others;
  * when every lifted vector passes, the two bounds meet, which forces
    the exact elimination to have the same pivot structure, the same
    normal set, and exactly these basis polynomials.

Bad primes and failed reconstructions are detected by the certificate
failing and are retried with a doubled prime batch; they never corrupt
the output.  The result is bit-for-bit what exact elimination returns,
at a fraction of the cost.
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from loopinv._kernel import rref_mod_p
from loopinv.polyring import (
    GRLEX, Exponents, Polynomial, Rational, TermOrder, monomial_divides,
)

# 30-bit primes, largest first; products of two residues fit in int64
PRIMES = (
    1073741789, 1073741783, 1073741741, 1073741723, 1073741719, 1073741717, 1073741689, 1073741671,
    1073741663, 1073741651, 1073741621, 1073741567, 1073741561, 1073741527, 1073741503, 1073741477,
    1073741467, 1073741441, 1073741419, 1073741399, 1073741387, 1073741381, 1073741371, 1073741329,
    1073741311, 1073741309, 1073741287, 1073741237, 1073741213, 1073741197, 1073741189, 1073741173,
    1073741101, 1073741077, 1073741047, 1073740963, 1073740951, 1073740933, 1073740909, 1073740879,
    1073740853, 1073740847, 1073740819, 1073740807, 1073740793, 1073740783, 1073740781, 1073740697,
    1073740693, 1073740691, 1073740649, 1073740609, 1073740571, 1073740567, 1073740543, 1073740541,
    1073740537, 1073740529, 1073740523, 1073740517, 1073740501, 1073740489, 1073740477, 1073740463,
    1073740439, 1073740403, 1073740391, 1073740379, 1073740249, 1073740201, 1073740189, 1073740183,
    1073740177, 1073740163, 1073740147, 1073740139, 1073740133, 1073740127, 1073740123, 1073740079,
    1073740067, 1073740061, 1073740049, 1073740013, 1073739983, 1073739949, 1073739937, 1073739917,
    1073739911, 1073739893, 1073739883, 1073739881, 1073739859, 1073739853, 1073739817, 1073739767,
    1073739749, 1073739739, 1073739721, 1073739683, 1073739679, 1073739649, 1073739631, 1073739619,
    1073739617, 1073739599, 1073739577, 1073739559, 1073739523, 1073739493, 1073739473, 1073739451,
    1073739449, 1073739437, 1073739421, 1073739379, 1073739367, 1073739361, 1073739353, 1073739347,
    1073739313, 1073739311, 1073739307, 1073739187, 1073739179, 1073739169, 1073739167, 1073739151,
)


class PointSet:
    """Finite set of rational points; duplicates dropped, order preserved.

    shortfall is set by sample collection when fewer points than asked
    for could be gathered.
    """

    __slots__ = ("points", "dimension", "shortfall")

    def __init__(self, points: Sequence[Sequence], shortfall: bool = False):
        seen = set()
        kept: List[Tuple[Rational, ...]] = []
        dim = None
        for pt in points:
            tup = tuple(Rational(c) for c in pt)
            if dim is None:
                dim = len(tup)
            elif len(tup) != dim:
                raise ValueError("points of mixed dimension")
            if tup not in seen:
                seen.add(tup)
                kept.append(tup)
        self.points = tuple(kept)
        self.dimension = dim if dim is not None else 0
        self.shortfall = shortfall

    def __len__(self):
        return len(self.points)


class VanishingIdealBasis:
    """Reduced Groebner basis of the ideal of a point set.

    basis holds the elements whose coefficient vectors were lifted to
    exact rationals and certified.  When a coefficient degree cap was
    requested, elements with leading monomial above the cap appear only
    through closure_leading_monomials: their leading monomials are known,
    their coefficients were never lifted.  Without a cap that list is
    empty.  basis_size counts both kinds.
    """

    __slots__ = ("basis", "normal_set", "min_degree", "closure_leading_monomials")

    def __init__(self, basis: List[Polynomial], normal_set: List[Exponents],
                 min_degree: int, closure_leading_monomials: Optional[List[Exponents]] = None):
        self.basis = basis
        self.normal_set = normal_set
        self.min_degree = min_degree
        self.closure_leading_monomials = closure_leading_monomials or []

    @property
    def basis_size(self) -> int:
        return len(self.basis) + len(self.closure_leading_monomials)


def monomials_through(n: int, max_deg: int, order: TermOrder = GRLEX) -> List[Exponents]:
    """All exponent vectors of total degree <= max_deg, ascending."""
    if n == 0:
        return [()]
    out: List[Exponents] = []

    def layer(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining + 1):
            layer(prefix + (e,), remaining - e, slots - 1)

    for d in range(max_deg + 1):
        layer((), d, n)
    return sorted(out, key=order.key)


def _residue_rows(points: Tuple[Tuple[Rational, ...], ...], p: int) -> Optional[List[Tuple[int, ...]]]:
    """Point coordinates as residues mod p; None if p divides a denominator."""
    rows = []
    for pt in points:
        row = []
        for c in pt:
            num = int(c.numerator) % p
            den = int(c.denominator) % p
            if den == 0:
                return None
            row.append(num * pow(den, p - 2, p) % p)
        rows.append(tuple(row))
    return rows


def _eval_matrix(rows: List[Tuple[int, ...]], monos: List[Exponents],
                 index: Dict[Exponents, int], p: int) -> np.ndarray:
    """Monomial evaluation matrix mod p, one row per point.

    Columns are filled through the recurrence col(m * x_i) = col(m) * x_i,
    valid because the monomial list is closed under division.
    """
    s, t = len(rows), len(monos)
    M = np.zeros((s, t), dtype=np.int64)
    coords = np.array(rows, dtype=np.int64)
    for j, m in enumerate(monos):
        d = sum(m)
        if d == 0:
            M[:, j] = 1
            continue
        i = next(k for k, e in enumerate(m) if e > 0)
        parent = tuple(e - 1 if k == i else e for k, e in enumerate(m))
        M[:, j] = M[:, index[parent]] * coords[:, i] % p
    return M


def _nullspace(R: np.ndarray, pivots: List[int], t: int, p: int) -> List[Dict[int, int]]:
    """Normal-form nullspace vectors of the reduced matrix, one per free column.

    Vector for free column j: coefficient 1 at j, -R[i, j] at pivot column
    pivots[i], zero elsewhere.
    """
    pivot_set = set(pivots)
    vecs = []
    for j in range(t):
        if j in pivot_set:
            continue
        v = {j: 1}
        for i, pc in enumerate(pivots):
            if pc > j:
                break
            a = int(R[i, j])
            if a:
                v[pc] = (-a) % p
        vecs.append(v)
    return vecs


def _crt(residues: List[int], moduli: List[int]) -> Tuple[int, int]:
    """Combine congruences; returns (value, product of moduli)."""
    x, m = residues[0], moduli[0]
    for r, p in zip(residues[1:], moduli[1:]):
        # x + m * k == r (mod p)
        k = (r - x) * pow(m % p, p - 2, p) % p
        x += m * k
        m *= p
    return x % m, m


def _rational_reconstruct(u: int, m: int) -> Optional[Rational]:
    """Lift u mod m to n/d with |n|, d <= sqrt(m/2), gcd(n, d) = 1."""
    bound = math.isqrt(m // 2)
    r0, r1 = m, u % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, abs(s1)) != 1:
        return None
    if s1 < 0:
        r1, s1 = -r1, -s1
    return Rational(r1, s1)


def _power_tables(points, max_deg: int) -> List[List[List[Rational]]]:
    """pow_table[point][var][e] = coordinate^e, exact."""
    tables = []
    for pt in points:
        per_var = []
        for c in pt:
            powers = [Rational(1)]
            for _ in range(max_deg):
                powers.append(powers[-1] * c)
            per_var.append(powers)
        tables.append(per_var)
    return tables


def _vanishes_everywhere(coeffs: Dict[Exponents, Rational], tables) -> bool:
    for per_var in tables:
        total = Rational(0)
        for mono, c in coeffs.items():
            v = c
            for i, e in enumerate(mono):
                if e:
                    v = v * per_var[i][e]
            total += v
        if total != 0:
            return False
    return True


class _Attempt:
    __slots__ = ("status", "rank", "pivots", "basis_coeffs", "free_cols")

    def __init__(self, status, rank=0, pivots=None, basis_coeffs=None, free_cols=None):
        self.status = status
        self.rank = rank
        self.pivots = pivots
        self.basis_coeffs = basis_coeffs
        self.free_cols = free_cols


def _attempt(points, monos, index, nprimes: int, tables, prefix_len: int,
             require_full_rank: bool = True) -> _Attempt:
    """One discovery round with a fixed prime batch.

    Coefficient vectors are lifted and exactness-certified only for free
    columns inside the prefix (the first prefix_len columns).  Because
    elimination is leftmost-greedy, the rref of the prefix block equals
    the prefix of the full rref, so the counting certificate applies to
    the prefix on its own: every lifted prefix vector verifying exactly
    pins the prefix pivot structure and proves the lifted set complete.
    """
    s = len(points)
    t = len(monos)
    per_prime = []
    for p in PRIMES[:nprimes]:
        rows = _residue_rows(points, p)
        if rows is None:
            continue
        M = _eval_matrix(rows, monos, index, p)
        pivots = rref_mod_p(M, p)
        per_prime.append((p, M, tuple(pivots)))
    if not per_prime:
        return _Attempt("escalate")

    # primes can only lose rank, so the best-rank structure is the most
    # faithful; among equals take the most common
    best_rank = max(len(st) for _, _, st in per_prime)
    counts: Dict[Tuple[int, ...], int] = {}
    for _, _, st in per_prime:
        if len(st) == best_rank:
            counts[st] = counts.get(st, 0) + 1
    structure = max(counts, key=lambda st: counts[st])
    agreeing = [(p, M) for p, M, st in per_prime if st == structure]

    if require_full_rank and best_rank < s:
        return _Attempt("more_monomials", rank=best_rank)
    pivots = list(structure)
    free_cols = [j for j in range(t) if j not in set(pivots)]

    # structure past the prefix is reported without lifted coefficients;
    # insist on two independently agreeing primes for it
    if prefix_len < t and any(j >= prefix_len for j in free_cols) and len(agreeing) < 2:
        return _Attempt("escalate")

    vec_residues: List[List[Dict[int, int]]] = []
    for p, M in agreeing:
        vec_residues.append(_nullspace(M, pivots, t, p))
    moduli = [p for p, _ in agreeing]

    basis_coeffs: Dict[int, Dict[Exponents, Rational]] = {}
    for vi, j in enumerate(free_cols):
        if j >= prefix_len:
            continue
        support = vec_residues[0][vi].keys()
        coeffs: Dict[Exponents, Rational] = {}
        for col in support:
            res = [vecs[vi].get(col, 0) for vecs in vec_residues]
            u, m = _crt(res, moduli)
            q = _rational_reconstruct(u, m)
            if q is None:
                return _Attempt("escalate")
            if q != 0:
                coeffs[monos[col]] = q
        # exact certificate: the lifted vector must vanish on every point
        if not _vanishes_everywhere(coeffs, tables):
            return _Attempt("escalate")
        basis_coeffs[j] = coeffs

    return _Attempt("ok", pivots=pivots, basis_coeffs=basis_coeffs, free_cols=free_cols)


def buchberger_moeller(S: PointSet, order: TermOrder = GRLEX,
                       variables: Optional[Sequence[str]] = None,
                       coeff_degree_cap: Optional[int] = None) -> VanishingIdealBasis:
    """Reduced Groebner basis of the vanishing ideal of S.

    Monomials are swept in ascending order; a monomial whose evaluation
    vector is independent of its predecessors joins the normal set, and a
    dependent one contributes the dependency as a basis polynomial.  The
    sweep stops once the normal set counts |S| monomials and the whole
    border of the normal set has been processed.

    variables names the polynomial ring; defaults to x1..xn.

    coeff_degree_cap, when given, bounds the leading-monomial degree up
    to which coefficient vectors are lifted to exact rationals; basis
    elements above the cap are reported through their leading monomials
    only.  Closure elements of point sets from long trajectories can
    carry coefficients of astronomical height that no caller consumes;
    the cap keeps those unlifted without touching what is certified.
    """
    if len(S) == 0:
        raise ValueError("empty point set")
    points = S.points
    n = S.dimension
    s = len(points)
    if variables is None:
        variables = tuple(f"x{i+1}" for i in range(n))
    else:
        variables = tuple(variables)
        if len(variables) != n:
            raise ValueError("variable count does not match point dimension")

    # smallest sweep degree whose monomial count reaches |S|
    D = 0
    while len(monomials_through(n, D, order)) < s:
        D += 1
    D = max(D, 1)

    nprimes = 2
    last_rank = -1
    while True:
        monos = monomials_through(n, D, order)
        index = {m: j for j, m in enumerate(monos)}
        if coeff_degree_cap is None:
            prefix_len = len(monos)
            table_deg = D
        else:
            prefix_len = sum(1 for m in monos if sum(m) <= coeff_degree_cap)
            table_deg = min(D, coeff_degree_cap)
        tables = _power_tables(points, table_deg)
        att = _attempt(points, monos, index, nprimes, tables, prefix_len)
        if att.status == "more_monomials":
            # rank must grow with the sweep degree until it reaches |S|;
            # a stall means every prime in the batch lost rank
            if att.rank <= last_rank and nprimes < len(PRIMES):
                nprimes = min(2 * nprimes, len(PRIMES))
            else:
                D += 1
            last_rank = att.rank
            continue
        if att.status == "escalate":
            if nprimes >= len(PRIMES):
                raise RuntimeError("prime budget exhausted without certification")
            nprimes = min(2 * nprimes, len(PRIMES))
            continue
        pivot_monos = [monos[j] for j in att.pivots]
        if pivot_monos and max(sum(m) for m in pivot_monos) >= D:
            # border of the normal set sticks out past the sweep; widen it
            D += 1
            continue
        free_monos = {j: monos[j] for j in att.free_cols}
        free_set = set(free_monos.values())
        basis: List[Polynomial] = []
        closure: List[Exponents] = []
        all_lm_degrees: List[int] = []
        for j in att.free_cols:
            fm = free_monos[j]
            # multiples of another leading monomial are consequences, not
            # reduced-basis members
            if any(m != fm and monomial_divides(m, fm) for m in free_set):
                continue
            all_lm_degrees.append(sum(fm))
            if j < prefix_len:
                basis.append(Polynomial(variables, att.basis_coeffs[j]))
            else:
                closure.append(fm)
        min_degree = min(all_lm_degrees)
        return VanishingIdealBasis(basis, pivot_monos, min_degree, closure)


def bounded_relations(S: PointSet, max_degree: int, order: TermOrder = GRLEX,
                      variables: Optional[Sequence[str]] = None) -> List[Polynomial]:
    """Certified complete list of degree-bounded vanishing relations.

    Returns every reduced-basis element with leading monomial of total
    degree <= max_degree, exact and in ascending leading-monomial order.
    Unlike the full sweep this never walks the border of the normal set,
    so it stays cheap when only low-degree relations matter.
    """
    if len(S) == 0:
        raise ValueError("empty point set")
    points = S.points
    n = S.dimension
    if variables is None:
        variables = tuple(f"x{i+1}" for i in range(n))
    else:
        variables = tuple(variables)
        if len(variables) != n:
            raise ValueError("variable count does not match point dimension")

    monos = monomials_through(n, max_degree, order)
    index = {m: j for j, m in enumerate(monos)}
    tables = _power_tables(points, max_degree)
    nprimes = 2
    while True:
        att = _attempt(points, monos, index, nprimes, tables, len(monos),
                       require_full_rank=False)
        if att.status == "ok":
            break
        if nprimes >= len(PRIMES):
            raise RuntimeError("prime budget exhausted without certification")
        nprimes = min(2 * nprimes, len(PRIMES))
    free_set = {monos[j] for j in att.free_cols}
    out = []
    for j in att.free_cols:
        fm = monos[j]
        if any(m != fm and monomial_divides(m, fm) for m in free_set):
            continue
        out.append(Polynomial(variables, att.basis_coeffs[j]))
    return out
