# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Row reduction over a prime field, compiled kernel.

Same contract as the numpy fallback: reduce an int64 matrix with
entries in [0, p) to reduced row echelon form in place, leftmost-greedy
pivot choice, and return the pivot column indices.  p must stay below
2^30 so products of two residues fit int64.
"""


cdef long long _inv_mod(long long a, long long p) noexcept:
    cdef long long result = 1
    cdef long long base = a % p
    cdef long long e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def rref_mod_p(M, long long p):
    cdef long long[:, ::1] A = M
    cdef Py_ssize_t rows = A.shape[0]
    cdef Py_ssize_t cols = A.shape[1]
    cdef Py_ssize_t r = 0
    cdef Py_ssize_t c, i, j, k
    cdef long long inv, factor, tmp
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        i = -1
        for k in range(r, rows):
            if A[k, c] != 0:
                i = k
                break
        if i < 0:
            continue
        if i != r:
            for j in range(cols):
                tmp = A[r, j]
                A[r, j] = A[i, j]
                A[i, j] = tmp
        inv = _inv_mod(A[r, c], p)
        for j in range(cols):
            A[r, j] = A[r, j] * inv % p
        for k in range(rows):
            if k == r:
                continue
            factor = A[k, c]
            if factor == 0:
                continue
            # C remainder can come out negative; fold back into [0, p)
            for j in range(cols):
                A[k, j] = (A[k, j] - factor * A[r, j]) % p
                if A[k, j] < 0:
                    A[k, j] += p
        pivots.append(c)
        r += 1
    return pivots
