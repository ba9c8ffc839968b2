"""Exact dense linear algebra over the prime field F_p.

Matrices are numpy arrays with integer entries reduced into [0, p).  All the
heavy work (row reduction, kernels, repeated solves) is done with float64
matrix products followed by reduction mod p, which is exact as long as every
intermediate value stays below 2**53; with p <= 25 (we also reduce mod p**2
matrices elsewhere) and inner dimensions in the low thousands this bound is
never approached.

Row reduction uses a fixed deterministic pivot rule -- the first row with a
nonzero entry, scanning columns left to right -- so that every derived object
(kernels, resolutions, caches) is bit-for-bit reproducible.
"""

from __future__ import annotations

import numpy as np

_PANEL = 128


def _as_fp(a, p: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64) % p
    return a.astype(np.float64)


def _inv_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, p - 2, p)
    return inv


def mm(a, b, p: int) -> np.ndarray:
    """Exact matrix product mod p via float64 (BLAS); int64 result."""
    c = np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)
    return (c % p).astype(np.int64)


def rref(a, p: int):
    """Reduced row echelon form over F_p.

    Returns ``(r, rank, pivot_cols)`` where ``r`` is the reduced matrix
    (int64, entries in [0, p)) and ``pivot_cols`` lists the pivot column of
    each of the first ``rank`` rows.
    """
    r, pivots = _echelon(_as_fp(a, p), p)
    _back_substitute(r, pivots, p)
    return r.astype(np.int64), len(pivots), [c for _, c in pivots]


def rank(a, p: int) -> int:
    _, pivots = _echelon(_as_fp(a, p), p)
    return len(pivots)


def _echelon(r: np.ndarray, p: int):
    """In-place forward elimination to row echelon form (pivot rows scaled
    to 1, entries below pivots cleared).  Returns (r, [(row, col), ...]).

    Within a column panel the rows accumulate without reduction mod p
    (bounded by _PANEL * p**2, exact in float64); residues are taken when a
    value feeds a pivot decision and once per panel at the end.
    """
    m, n = r.shape
    inv = _inv_table(p)
    pivots: list[tuple[int, int]] = []
    nr = 0  # rows 0..nr-1 hold the pivots found so far
    j0 = 0
    while j0 < n and nr < m:
        j1 = min(j0 + _PANEL, n)
        panel = r[:, j0:j1]
        panel_pivots = []  # (global_row, global_col)
        mults = []  # multiplier column per panel pivot, rows nr0..m
        nr0 = nr
        for j in range(j1 - j0):
            col = panel[nr:, j] % p
            nz = np.nonzero(col)[0]
            if nz.size == 0:
                continue
            i = nr + int(nz[0])
            if i != nr:
                panel[[nr, i]] = panel[[i, nr]]
                r[[nr, i], j1:] = r[[i, nr], j1:]
                for mcol in mults:
                    mcol[[nr - nr0, i - nr0]] = mcol[[i - nr0, nr - nr0]]
            piv = int(col[i - nr])
            pivrow = panel[nr] % p
            if piv != 1:
                pivrow = pivrow * inv[piv] % p
            panel[nr] = pivrow
            below = panel[nr + 1 :, j] % p
            if below.any():
                panel[nr + 1 :, j:] -= np.outer(below, pivrow[j:])
            mcol = np.zeros(m - nr0)
            mcol[nr + 1 - nr0 :] = below
            mcol[nr - nr0] = (inv[piv] - 1) % p if piv != 1 else 0
            mults.append(mcol)
            panel_pivots.append((nr, j0 + j))
            nr += 1
        np.mod(panel, p, out=panel)
        if panel_pivots and j1 < n:
            _apply_panel(r[nr0:, j1:], mults, [row - nr0 for row, _ in panel_pivots], p)
        pivots.extend(panel_pivots)
        j0 = j1
    np.mod(r, p, out=r)
    return r, pivots


def _apply_panel(block: np.ndarray, mults, pivrows, p: int):
    """Replay a panel's row operations on trailing columns.

    Recorded op t scaled pivot row t then subtracted multiples of it from the
    rows below.  The pivot rows feed each other, so their net effect is a
    small k x k transform (replayed on an identity); every other row then
    updates in one matrix product against the finished pivot rows.
    """
    k = len(pivrows)
    t_small = np.eye(k)
    for t in range(k):
        mcol = mults[t]
        s = mcol[pivrows[t]]
        if s:
            t_small[t] = t_small[t] * (1 + s) % p
        coeffs = np.array([mcol[pivrows[u]] for u in range(t + 1, k)])
        if coeffs.any():
            t_small[t + 1 :] = (t_small[t + 1 :] - np.outer(coeffs, t_small[t])) % p
    new_piv = t_small @ (block[pivrows] % p) % p
    mask = np.ones(block.shape[0], dtype=bool)
    mask[pivrows] = False
    coeff = np.stack([m[mask] for m in mults], axis=1)
    if coeff.any():
        block[mask] = ((block[mask] % p) - coeff @ new_piv) % p
    block[pivrows] = new_piv


def _unit_upper_inverse(u: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a unit upper triangular matrix over F_p."""
    k = u.shape[0]
    inv = np.eye(k)
    for t in range(k - 2, -1, -1):
        row = inv[t]
        coeffs = u[t, t + 1 :]
        if coeffs.any():
            inv[t] = (row - coeffs @ inv[t + 1 :]) % p
    return inv


def _back_substitute(r: np.ndarray, pivots, p: int):
    """Clear entries above the pivots, turning echelon form into RREF."""
    j0 = len(pivots)
    while j0 > 0:
        j1 = max(0, j0 - _PANEL)
        rows = [pivots[t][0] for t in range(j1, j0)]
        cols = [pivots[t][1] for t in range(j1, j0)]
        # batch rows relate to their reduced forms by a unit upper
        # triangular matrix read off at the batch pivot columns
        u = r[np.ix_(rows, cols)]
        newrows = _unit_upper_inverse(u, p) @ r[rows] % p
        above = rows[0]
        if above:
            coeff = r[:above, cols]
            if coeff.any():
                r[:above] = (r[:above] - coeff @ newrows) % p
        r[rows] = newrows
        j0 = j1


def kernel_basis(a, p: int) -> np.ndarray:
    """Basis of the right kernel of ``a`` over F_p, as matrix columns."""
    a = np.asarray(a, dtype=np.int64)
    m, n = a.shape
    r, rk, piv = rref(a, p)
    free = [j for j in range(n) if j not in set(piv)]
    k = np.zeros((n, len(free)), dtype=np.int64)
    for t, f in enumerate(free):
        k[f, t] = 1
        for i, c in enumerate(piv):
            k[c, t] = (-r[i, f]) % p
    return k


def solve(a, b, p: int):
    """One solution of ``a @ x = b`` over F_p, or None if inconsistent."""
    return Solver(a, p).solve(b)


class Solver:
    """Factor a matrix once, then answer many ``a @ x = b`` queries.

    Stores the row transform ``e`` with ``e @ a = r`` in RREF, so each solve
    is a single matrix-vector product plus a consistency check.
    """

    def __init__(self, a, p: int):
        a = np.asarray(a, dtype=np.int64) % p
        self.p = p
        self.shape = a.shape
        m, n = a.shape
        aug = np.concatenate([a.astype(np.float64), np.eye(m)], axis=1)
        aug, pivots = _echelon(aug, p)
        # only reduce above pivots of the A-part; the E-part rides along
        _back_substitute(aug, pivots, p)
        dtype = np.int8 if p <= 11 else np.int64
        self.r = aug[:, :n].astype(dtype)
        self.e = aug[:, n:].astype(dtype)
        self.pivots = [c for _, c in pivots if c < n]
        self.rank = len(self.pivots)

    def solve_many(self, b: np.ndarray):
        """Solve for every column of ``b``; returns x or None if any column
        is inconsistent."""
        b = np.asarray(b, dtype=np.int64) % self.p
        single = b.ndim == 1
        if single:
            b = b[:, None]
        c = (self.e.astype(np.float64) @ b.astype(np.float64)) % self.p
        c = c.astype(np.int64)
        if c[self.rank :].any():
            return None
        m, n = self.shape
        x = np.zeros((n, b.shape[1]), dtype=np.int64)
        x[self.pivots] = c[: self.rank]
        return x[:, 0] if single else x

    def solve(self, b):
        return self.solve_many(b)

    def in_image(self, b) -> bool:
        return self.solve_many(b) is not None
