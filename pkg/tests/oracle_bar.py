"""Brute-force mod-p cohomology from the normalized bar complex.

Independent oracle for resolution ranks: builds the coboundary matrices on
normalized tuple bases directly from the multiplication table and counts
dimensions.  Exponential in the degree, so callers keep |G|^(n+1) small.
"""

import numpy as np

from pcoh.linalg import rank


def _nonidentity(group):
    e = group.identity().index
    return np.array([i for i in range(group.order) if i != e])


def coboundary_matrix(group, n):
    """delta_n : C^n -> C^(n+1) on normalized cochains, conditions indexed by
    nonidentity (n+1)-tuples."""
    p = group.p
    mul = group.mul_table()
    e = group.identity().index
    nz = _nonidentity(group)
    m = len(nz)
    cols = m**n
    rows = m ** (n + 1)
    pos = {g: t for t, g in enumerate(nz)}

    def col_index(tup):
        # index of a nonidentity tuple in C^n; None if degenerate
        acc = 0
        for g in tup:
            if g == e:
                return None
            acc = acc * m + pos[g]
        return acc

    mat = np.zeros((rows, cols), dtype=np.int64)
    for r in range(rows):
        idx = []
        rr = r
        for _ in range(n + 1):
            idx.append(nz[rr % m])
            rr //= m
        idx.reverse()
        terms = [(1, tuple(idx[1:]))]
        for i in range(n):
            merged = tuple(idx[:i] + [int(mul[idx[i], idx[i + 1]])] + idx[i + 2 :])
            terms.append(((-1) ** (i + 1), merged))
        terms.append(((-1) ** (n + 1), tuple(idx[:n])))
        for sign, tup in terms:
            c = col_index(tup)
            if c is not None:
                mat[r, c] = (mat[r, c] + sign) % p
    return mat


def bar_cohomology_dims(group, nmax):
    """dim H^n(G; F_p) for 0 <= n <= nmax by brute force."""
    p = group.p
    ranks = {}
    for n in range(nmax + 1):
        ranks[n] = rank(coboundary_matrix(group, n), p)
    m = group.order - 1
    dims = [1]
    for n in range(1, nmax + 1):
        ker = m**n - ranks[n]
        dims.append(ker - ranks[n - 1])
    return dims
