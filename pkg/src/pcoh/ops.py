"""Cohomology operations: cup products, Bockstein, restriction and
transfer, and (matric) Massey triple products with indeterminacy.

Products are Yoneda compositions of chain-map lifts on the minimal
resolution: cup(a, b) is the class of a_0 o b_{|a|}, which matches the
front/back-face product under the bar comparison.  Massey products run in
the differential graded algebra of graded self-maps of the resolution; a
stored (unsigned) chain map f of shift n enters as its signed companion
f^s_i = (-1)^(n i) f_i so that the usual Leibniz bookkeeping applies, and
null-homotopies are found degree by degree with the factored differentials.

Everything is deterministic: homotopies take the zero bottom component and
the solver's first solution above it, and all comparisons with stated
values happen modulo the reported indeterminacy, never on representatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conventions import conventions
from .groups import SubgroupEmbedding
from .linalg import mm, rref
from .resolution import CohClass, Resolution, ResolutionError, coh_class


class UndefinedProductError(RuntimeError):
    pass


# -- cup and Bockstein --------------------------------------------------------


def cup(r: Resolution, a: CohClass, b: CohClass) -> CohClass:
    """Product of two classes: compose the lift of b into the lift of a."""
    n, m = a.degree, b.degree
    r.check_degree(n + m)
    if n == 0:
        return coh_class(m, a.vec[0] * b.array() % r.p)
    if m == 0:
        return coh_class(n, b.vec[0] * a.array() % r.p)
    la = r.lift(a, 0).levels[0]
    lb = r.lift(b, n).levels[n]
    return r.class_of_map(mm(la, lb, r.p), n + m)


def cup_many(r: Resolution, classes) -> CohClass:
    """Left-to-right product of several classes."""
    out = None
    for c in classes:
        out = c if out is None else cup(r, out, c)
    return out if out is not None else r.unit()


def bockstein(r: Resolution, a: CohClass) -> CohClass:
    """Connecting map of 0 -> F_p -> Z/p^2 -> F_p -> 0 on the lifted
    resolution: (lifted cocycle o lifted differential) / p."""
    r.check_degree(a.degree + 1)
    vec = r.bock_mat(a.degree) @ a.array() % r.p
    if conventions.bockstein_sign != 1:
        vec = (-vec) % r.p
    return coh_class(a.degree + 1, vec)


# -- subgroup comparison: restriction and transfer ----------------------------


class _SubgroupComparison:
    """Chain maps between an ambient resolution restricted to a subgroup and
    the subgroup's own minimal resolution.

    theta[n] : Q_n -> P_n|_H lifts the identity using the ambient solver;
    sigma[n] : P_n|_H -> Q_n goes the other way using the subgroup solver,
    solved on the H-free basis {t * e_m} over the right transversal
    (inverses of the stored left-coset representatives).
    """

    def __init__(self, emb: SubgroupEmbedding, rg: Resolution, rh: Resolution):
        self.emb = emb
        self.rg = rg
        self.rh = rh
        ng, nh = rg.group.order, rh.group.order
        if rh.group is not emb.subgroup or rg.group is not emb.ambient:
            raise ValueError("embedding does not match the resolutions")
        # index tables for switching coordinates
        inj = np.array([emb.ambient_index(h) for h in range(nh)], dtype=np.int64)
        self.inj = inj
        slot, sub = emb.decompose_right()
        self.slot, self.sub = slot.astype(np.int64), sub.astype(np.int64)
        self.tidx = np.array([t.inverse().index for t in emb.transversal], dtype=np.int64)
        self.theta: list = []
        self.sigma: list = []

    def _extend_theta(self, n: int):
        rg, rh = self.rg, self.rh
        ng, nh = rg.group.order, rh.group.order
        p = rg.p
        while len(self.theta) <= n:
            k = len(self.theta)
            if k == 0:
                m0 = np.zeros((ng, nh), dtype=np.int64)
                m0[self.inj, np.arange(nh)] = 1
                self.theta.append(m0)
                continue
            rhs = mm(self.theta[k - 1], rh.gen_images[k].T, p)
            sol = rg.solver(k).solve_many(rhs)
            assert sol is not None, "theta lifting must be solvable"
            # extend H-linearly: column (m, h) = inject(h) acting on sol[:, m]
            t = rg._act()
            full = np.zeros((rg.dim(k), rh.ranks[k] * nh), dtype=np.int64)
            rows = np.arange(rg.dim(k))
            for h in range(nh):
                perm = (rows // ng) * ng + t[rows % ng, self.inj[h]]
                full[:, np.arange(rh.ranks[k]) * nh + h] = sol[perm]
            self.theta.append(full)

    def _extend_sigma(self, n: int):
        rg, rh = self.rg, self.rh
        ng, nh = rg.group.order, rh.group.order
        p = rg.p
        idx = self.emb.index
        while len(self.sigma) <= n:
            k = len(self.sigma)
            if k == 0:
                m0 = np.zeros((nh, ng), dtype=np.int64)
                m0[self.sub, np.arange(ng)] = 1
                self.sigma.append(m0)
                continue
            # H-basis of P_k|_H: t * e_m over the right transversal
            basis_cols = (np.arange(rg.ranks[k])[:, None] * ng + self.tidx[None, :]).ravel()
            rhs = mm(self.sigma[k - 1], rg.full_diff(k)[:, basis_cols], p)
            sol = rh.solver(k).solve_many(rhs)
            assert sol is not None, "sigma lifting must be solvable"
            # extend H-linearly to all ambient columns: g = h * t
            th = rh._act()
            full = np.zeros((rh.dim(k), rg.dim(k)), dtype=np.int64)
            hrows = np.arange(rh.dim(k))
            cols_of = np.arange(rg.ranks[k])[:, None] * ng  # block starts
            for g in range(ng):
                j, h = int(self.slot[g]), int(self.sub[g])
                perm = (hrows // nh) * nh + th[hrows % nh, h]
                src = sol[:, np.arange(rg.ranks[k]) * idx + j]
                full[:, (cols_of.ravel() + g)] = src[perm]
            self.sigma.append(full)


def _comparison(emb: SubgroupEmbedding, rg: Resolution, rh: Resolution) -> _SubgroupComparison:
    key = ("subcmp", id(emb), id(rh))
    got = rg._aux.get(key)
    if got is None:
        got = _SubgroupComparison(emb, rg, rh)
        rg._aux[key] = got
    return got


def restrict(rg: Resolution, rh: Resolution, emb: SubgroupEmbedding, a: CohClass) -> CohClass:
    """Image under the restriction map to the subgroup."""
    n = a.degree
    rg.check_degree(n)
    rh.check_degree(n)
    if emb.subgroup is emb.ambient:
        return a
    cmp_ = _comparison(emb, rg, rh)
    cmp_._extend_theta(n)
    row = rg.aug_functional(a)
    vals = row @ cmp_.theta[n][:, rh.gen_columns(n)] % rg.p
    return coh_class(n, vals)


def corestrict(rg: Resolution, rh: Resolution, emb: SubgroupEmbedding, f: CohClass) -> CohClass:
    """Transfer to the ambient group: sum the subgroup cochain over the
    coset transversal through the comparison map."""
    n = f.degree
    rg.check_degree(n)
    rh.check_degree(n)
    if emb.subgroup is emb.ambient:
        return f
    cmp_ = _comparison(emb, rg, rh)
    cmp_._extend_sigma(n)
    row = rh.aug_functional(f)
    ng = rg.group.order
    out = np.zeros(rg.ranks[n], dtype=np.int64)
    for m in range(rg.ranks[n]):
        cols = m * ng + cmp_.tidx
        out[m] = (row @ cmp_.sigma[n][:, cols]).sum() % rg.p
    return coh_class(n, out)


# -- Massey products -----------------------------------------------------------


@dataclass
class MasseyResult:
    """A representative plus a basis of the indeterminacy subspace."""

    representative: CohClass
    indeterminacy: list

    @property
    def degree(self) -> int:
        return self.representative.degree

    def contains(self, cls_: CohClass, p: int) -> bool:
        if cls_.degree != self.degree:
            return False
        diff = (cls_.array() - self.representative.array()) % p
        if not diff.any():
            return True
        if not self.indeterminacy:
            return False
        basis = np.stack([c.array() for c in self.indeterminacy], axis=1)
        from .linalg import solve

        return solve(basis, diff, p) is not None

    def is_zero(self, p: int) -> bool:
        return self.contains(coh_class(self.degree, np.zeros(len(self.representative.vec))), p)


def _signed_level(r: Resolution, cls_: CohClass, i: int) -> np.ndarray:
    """Level i of the signed companion of the class's chain-map lift."""
    mat = r.lift(cls_, i).levels[i]
    if cls_.degree % 2 == 1 and i % 2 == 1:
        return (-mat) % r.p
    return mat


def _product_on_gens(r: Resolution, f: CohClass, g: CohClass, i: int) -> np.ndarray:
    """Component i of (signed lift of f) o (signed lift of g), restricted to
    the free generators of its source module."""
    p = r.p
    lf = _signed_level(r, f, i)
    lg = _signed_level(r, g, f.degree + i)
    gencols = r.gen_columns(f.degree + g.degree + i)
    return mm(lf, lg[:, gencols], p)


def _null_homotopy(r: Resolution, terms, k: int, levels: int):
    """Homotopy h (shift k-1, h_0 = 0) with D h = sum of the given signed
    products, solved out to h_levels.

    ``terms`` is a list of (f, g) class pairs; the target is the sum of
    their signed compositions, a degree-k cocycle in the Hom-algebra whose
    class must vanish.  Returns the list [h_0 ... h_levels] of full
    matrices."""
    p = r.p
    ng = r.group.order
    sgn = -1 if (k - 1) % 2 else 1
    h = [np.zeros((ng, r.dim(k - 1)), dtype=np.int64)]
    for i in range(levels):
        rhs = sum(_product_on_gens(r, f, g, i) for f, g in terms) % p
        rhs = (rhs + sgn * mm(h[i], r.gen_images[k + i].T, p)) % p
        sol = r.solver(i + 1).solve_many(rhs)
        if sol is None:
            raise ResolutionError("null homotopy system inconsistent")
        h.append(r.expand(sol.T.astype(np.int8), r.ranks[i + 1]).astype(np.int64))
    return h


def _indeterminacy_basis(r: Resolution, spans) -> list:
    """Reduced basis of a sum of cup-product slices; ``spans`` yields
    (left, right_degree, side) or explicit class lists."""
    rows = []
    degree = None
    for cls_list in spans:
        for c in cls_list:
            rows.append(c.array())
            degree = c.degree
    if not rows:
        return []
    mat = np.stack(rows, axis=0)
    red, rk, _ = rref(mat, r.p)
    return [coh_class(degree, row) for row in red[:rk]]


def _cup_span(r: Resolution, fixed: CohClass, free_degree: int, fixed_on_left: bool) -> list:
    out = []
    if free_degree < 0:
        return out
    for h in r.basis(free_degree):
        c = cup(r, fixed, h) if fixed_on_left else cup(r, h, fixed)
        if not c.is_zero():
            out.append(c)
    return out


def massey_triple(r: Resolution, u: CohClass, v: CohClass, w: CohClass) -> MasseyResult:
    """Triple product <u, v, w>: defined when uv = vw = 0, with value
    (-1)^|u| u b - a w for homotopies a, w of the two products, modulo
    u H^(|v|+|w|-1) + w H^(|u|+|v|-1)."""
    p = r.p
    nu, nv, nw = u.degree, v.degree, w.degree
    total = nu + nv + nw - 1
    r.check_degree(total)
    if not cup(r, u, v).is_zero() or not cup(r, v, w).is_zero():
        raise UndefinedProductError("Massey product undefined: a factor product is nonzero")
    b = _null_homotopy(r, [(v, w)], nv + nw, nu)
    # with a_0 = 0 the a w term contributes nothing to the class
    u0 = _signed_level(r, u, 0)
    compo = mm(u0, b[nu][:, r.gen_columns(total)], p)
    sign = -1 if nu % 2 else 1
    rep = coh_class(total, sign * compo.sum(axis=0) % p)
    indet = _indeterminacy_basis(
        r,
        [_cup_span(r, u, nv + nw - 1, True), _cup_span(r, w, nu + nv - 1, False)],
    )
    return MasseyResult(rep, indet)


def matric_massey(r: Resolution, row, col, w: CohClass) -> MasseyResult:
    """Matric product <(u_1..u_s), (v_1..v_s)^T, w>: needs sum u_i v_i = 0
    and every v_i w = 0; value (-1)^n sum u_i b_i - a w modulo
    sum u_i H + H w in the right degree."""
    p = r.p
    if len(row) != len(col) or not row:
        raise UndefinedProductError("row and column shapes differ")
    nu = {c.degree for c in row}
    nv = {c.degree for c in col}
    if len(nu) != 1 or len(nv) != 1:
        raise UndefinedProductError("matric entries must have uniform degrees")
    nu, nv, nw = nu.pop(), nv.pop(), w.degree
    total = nu + nv + nw - 1
    r.check_degree(total)
    s = sum((cup(r, a, b).array() for a, b in zip(row, col)), np.zeros(r.ranks[nu + nv], dtype=np.int64)) % p
    if s.any():
        raise UndefinedProductError("matric Massey product undefined: row.column nonzero")
    for b_ in col:
        if not cup(r, b_, w).is_zero():
            raise UndefinedProductError("matric Massey product undefined: column.scalar nonzero")
    acc = np.zeros(r.ranks[total], dtype=np.int64)
    gencols = r.gen_columns(total)
    for ui, vi in zip(row, col):
        b = _null_homotopy(r, [(vi, w)], nv + nw, nu)
        u0 = _signed_level(r, ui, 0)
        acc = (acc + mm(u0, b[nu][:, gencols], p).sum(axis=0)) % p
    sign = -1 if nu % 2 else 1
    rep = coh_class(total, sign * acc % p)
    spans = [_cup_span(r, ui, nv + nw - 1, True) for ui in row]
    spans.append(_cup_span(r, w, nu + nv - 1, False))
    indet = _indeterminacy_basis(r, spans)
    return MasseyResult(rep, indet)


def massey_times(r: Resolution, res: MasseyResult, c: CohClass) -> MasseyResult:
    """Post-multiply a Massey value by a class, carrying the indeterminacy
    along (products of the indeterminacy basis with the class)."""
    rep = cup(r, res.representative, c)
    indet = _indeterminacy_basis(r, [[x for x in (cup(r, b, c) for b in res.indeterminacy) if not x.is_zero()]])
    return MasseyResult(rep, indet)


# -- constraint search ---------------------------------------------------------


def find_class_by_constraints(rg: Resolution, degree: int, constraints) -> list:
    """All classes of the given degree whose restrictions match the targets.

    ``constraints``: list of (embedding, subgroup resolution, target class).
    Returns [] if infeasible, else [representative, kernel basis...] with the
    affine solution set representative + span(kernel).
    """
    p = rg.p
    rows = []
    rhs = []
    for emb, rh, target in constraints:
        if target.degree != degree:
            raise ValueError("constraint degree mismatch")
        mats = []
        for b in rg.basis(degree):
            mats.append(restrict(rg, rh, emb, b).array())
        rows.append(np.stack(mats, axis=1))
        rhs.append(target.array())
    a = np.concatenate(rows, axis=0)
    b = np.concatenate(rhs)
    from .linalg import Solver, kernel_basis

    sol = Solver(a, p).solve(b)
    if sol is None:
        return []
    kern = kernel_basis(a, p)
    out = [coh_class(degree, sol)]
    for t in range(kern.shape[1]):
        out.append(coh_class(degree, kern[:, t]))
    return out
