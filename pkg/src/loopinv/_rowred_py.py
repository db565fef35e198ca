"""Row reduction over a prime field, vectorized fallback kernel.

Same contract as the compiled extension: reduce an int64 matrix with
entries in [0, p) to reduced row echelon form in place, leftmost-greedy
pivot choice, and return the pivot column indices.  p must stay below
2^30 so products of two residues fit int64.
"""

import numpy as np


def rref_mod_p(M, p):
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        inv = pow(int(M[r, c]), p - 2, p)
        M[r] = M[r] * inv % p
        col = M[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            M[hit] = (M[hit] - np.outer(col[hit], M[r])) % p
        pivots.append(c)
        r += 1
    return pivots
