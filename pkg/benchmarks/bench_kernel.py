"""Timing comparison for the row-reduction backends.

Reduces the same matrices three ways: the compiled kernel, the numpy
fallback, and plain all-rational elimination.  Rational elimination is
only run up to a size cap; intermediate fractions grow too fast beyond
it, which is the reason the modular path exists.

Usage: python3 benchmarks/bench_kernel.py [--sizes 40,80,160] [--repeat 3]
"""

import argparse
import random
import time

import numpy as np

from loopinv._rowred_py import rref_mod_p as py_rref
from loopinv.polyring import rational
from loopinv.vanishing import monomials_through

try:
    from loopinv._rowred import rref_mod_p as c_rref
except ImportError:
    c_rref = None

PRIME = (1 << 29) + 11
RATIONAL_CAP = 80


def rational_rref(rows):
    """Leftmost-greedy reduced echelon form over exact rationals."""
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def random_case(rng, size):
    data = [rng.randrange(PRIME) for _ in range(size * size)]
    return np.array(data, dtype=np.int64).reshape(size, size)


def trajectory_case():
    """Evaluation matrix of a sampled degree-7 monomial sweep mod PRIME."""
    monos = monomials_through(2, 7)
    points = []
    x, y = 0, 0
    for _ in range(36):
        points.append((x % PRIME, y % PRIME))
        x, y = x + y ** 5, y + 1
    rows = [[pow(px, a, PRIME) * pow(py, b, PRIME) % PRIME
             for (a, b) in monos] for px, py in points]
    return np.array(rows, dtype=np.int64)


def timed(fn, make, repeat):
    best = None
    for _ in range(repeat):
        arg = make()
        t0 = time.perf_counter()
        fn(arg)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="40,80,160")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = random.Random(0)

    cases = [(f"random {n}x{n}", lambda n=n: random_case(rng, n), n)
             for n in sizes]
    cases.append(("trajectory 36x36", trajectory_case, 36))

    header = f"{'case':>18} {'compiled':>12} {'numpy':>12} {'rational':>12}"
    print(header)
    print("-" * len(header))
    for name, make, size in cases:
        row = [f"{name:>18}"]
        if c_rref is not None:
            t = timed(lambda M: c_rref(M, PRIME), make, args.repeat)
            row.append(f"{t * 1e3:>10.2f}ms")
        else:
            row.append(f"{'absent':>12}")
        t = timed(lambda M: py_rref(M, PRIME), make, args.repeat)
        row.append(f"{t * 1e3:>10.2f}ms")
        if size <= RATIONAL_CAP:
            def make_rational(make=make):
                return [[rational(int(v)) for v in r] for r in make()]
            t = timed(rational_rref, make_rational, args.repeat)
            row.append(f"{t * 1e3:>10.2f}ms")
        else:
            row.append(f"{'skipped':>12}")
        print(" ".join(row))


if __name__ == "__main__":
    main()
