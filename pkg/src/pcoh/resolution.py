"""Minimal free resolutions of the trivial module over F_p[G].

A free module F_p[G]^r is identified with F_p^(r*|G|); coordinate (m, g)
is index m*|G| + g under the group's canonical enumeration.  A module map
is stored by the images of the free generators ("gen images", one row per
source generator) and expanded on demand to its full F_p-matrix using the
left regular representation.

Construction of the resolution is the standard radical-complement loop:
the kernel of the current differential is computed as an F_p-subspace, its
radical is spanned by (g - 1) * kernel over the group generators (the
augmentation ideal is generated by g - 1 as a one-sided ideal), and the
reduced echelon basis of kernel-mod-radical becomes the next block of free
generators.  Every pivot choice is deterministic, so resolutions are
reproducible bit for bit.

Because the resolution is minimal, every differential entry lies in the
augmentation ideal, Hom(P_n, F_p) carries the zero differential, and a
degree-n cohomology class is just a coordinate vector of length rank_n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import GroupSpec
from .linalg import Solver, mm, rref


class ResolutionError(RuntimeError):
    pass


@dataclass(frozen=True)
class CohClass:
    """A homogeneous cohomology class: degree plus coordinates in the basis
    dual to the minimal generators of P_degree."""

    degree: int
    vec: tuple[int, ...]

    def key(self) -> tuple:
        return (self.degree, self.vec)

    def is_zero(self) -> bool:
        return not any(self.vec)

    def array(self) -> np.ndarray:
        return np.array(self.vec, dtype=np.int64)

    def __repr__(self):
        return f"CohClass(deg={self.degree}, {list(self.vec)})"


def coh_class(degree: int, vec) -> CohClass:
    return CohClass(degree, tuple(int(x) for x in np.asarray(vec, dtype=np.int64).ravel()))


@dataclass
class ChainMap:
    """A lift of a cohomology class to a chain self-map of the resolution:
    commuting squares d_i o f_i = f_{i-1} o d_{n+i}, stored as full
    F_p-matrices f_i : P_{n+i} -> P_i for 0 <= i <= len(levels)-1."""

    shift: int
    levels: list  # levels[i] : (N_i, N_{n+i}) numpy array

    def algebra_entry(self, resolution: "Resolution", i: int, row: int, col: int) -> np.ndarray:
        """The (row, col) group-algebra entry of f_i, as a coefficient vector."""
        ng = resolution.group.order
        colstart = col * ng + resolution._one_index
        return np.array(self.levels[i][row * ng : (row + 1) * ng, colstart])


class Resolution:
    def __init__(self, group: GroupSpec, dmax: int, ranks, gen_images):
        self.group = group
        self.dmax = dmax
        self.ranks = list(ranks)
        # gen_images[n] for 1 <= n <= dmax: (rank_n, rank_{n-1} * |G|) int8
        self.gen_images = gen_images
        self._one_index = group.identity().index
        self._full: dict[int, np.ndarray] = {}
        self._solvers: dict[int, Solver] = {}
        self._homotopy: dict[int, np.ndarray] = {}
        self._lifts: dict[tuple, list] = {}
        self._gen_images2: list | None = None
        self._bock: dict[int, np.ndarray] = {}
        self._act_table: np.ndarray | None = None
        self._aux: dict = {}  # cross-module caches (bar transports, comparisons)

    # -- shapes -------------------------------------------------------------

    @property
    def p(self) -> int:
        return self.group.p

    def betti(self, n: int) -> int:
        if not 0 <= n <= self.dmax:
            raise ResolutionError(f"degree {n} outside resolution bound {self.dmax}")
        return self.ranks[n]

    def dim(self, n: int) -> int:
        return self.ranks[n] * self.group.order

    def check_degree(self, n: int):
        if n > self.dmax:
            raise ResolutionError(f"degree {n} exceeds resolution bound {self.dmax}")

    # -- regular representation ----------------------------------------------

    def _act(self) -> np.ndarray:
        """Index table t[x, g] = index of g^-1 x; the column of g in the
        regular representation of a vector v is v[t[:, g]]."""
        if self._act_table is None:
            mul = self.group.mul_table()
            inv = self.group.inv_table()
            self._act_table = np.ascontiguousarray(mul[inv, :].T)
        return self._act_table

    def expand(self, images: np.ndarray, tgt_rank: int) -> np.ndarray:
        """Full matrix of the module map with the given generator images.

        images: (src_rank, tgt_rank * |G|); result: (tgt_rank * |G|,
        src_rank * |G|) with column (m, g) the g-translate of images[m]."""
        ng = self.group.order
        src_rank = images.shape[0]
        t = self._act()
        out = np.empty((tgt_rank * ng, src_rank * ng), dtype=images.dtype)
        img3 = images.reshape(src_rank, tgt_rank, ng)
        for m in range(src_rank):
            for r in range(tgt_rank):
                out[r * ng : (r + 1) * ng, m * ng : (m + 1) * ng] = img3[m, r][t]
        return out

    def act_columns(self, vec: np.ndarray, tgt_rank: int) -> np.ndarray:
        """All |G| translates of a single vector, as columns."""
        return self.expand(vec[None, :], tgt_rank)

    def full_diff(self, n: int) -> np.ndarray:
        """The F_p-matrix of d_n : P_n -> P_{n-1}."""
        got = self._full.get(n)
        if got is None:
            if not 1 <= n <= self.dmax:
                raise ResolutionError(f"no differential at degree {n}")
            got = self.expand(self.gen_images[n], self.ranks[n - 1])
            self._full[n] = got
        return got

    def solver(self, n: int) -> Solver:
        got = self._solvers.get(n)
        if got is None:
            got = Solver(self.full_diff(n), self.p)
            self._solvers[n] = got
        return got

    def gen_columns(self, n: int) -> np.ndarray:
        """Column indices of the free generators inside P_n."""
        ng = self.group.order
        return np.arange(self.ranks[n]) * ng + self._one_index

    def aug_functional(self, cls: CohClass) -> np.ndarray:
        """The row vector of the module map P_n -> F_p with the class's
        coordinates: sum each group-algebra block, weighted."""
        return np.repeat(cls.array(), self.group.order)

    def class_of_map(self, full_map: np.ndarray, degree: int) -> CohClass:
        """Class of a module map P_degree -> P_0 (composition with the
        augmentation, read off at the free generators)."""
        cols = full_map[:, self.gen_columns(degree)]
        return coh_class(degree, cols.sum(axis=0) % self.p)

    def basis(self, n: int) -> list[CohClass]:
        eye = np.eye(self.ranks[n], dtype=np.int64)
        return [coh_class(n, row) for row in eye]

    def unit(self) -> CohClass:
        return coh_class(0, [1])

    # -- construction ---------------------------------------------------------

    @classmethod
    def compute(cls, group: GroupSpec, dmax: int, max_module_dim: int = 8000) -> "Resolution":
        """Compute the minimal resolution out to degree dmax."""
        if dmax < 1:
            raise ResolutionError("degree bound must be at least 1")
        p = group.p
        ng = group.order
        res = cls(group, 0, [1], [None])
        # stage 0: kernel of the augmentation is spanned by g - 1
        eps = np.ones((1, ng), dtype=np.int64)
        kernel = _kernel_rows(Solver(eps, p))
        for n in range(1, dmax + 1):
            gens, rad_rank = res._minimal_generators(kernel)
            rank_n = gens.shape[0]
            if rank_n != kernel.shape[0] - rad_rank:
                raise ResolutionError("generator count does not match kernel/radical split")
            if rank_n * ng > max_module_dim:
                raise ResolutionError(
                    f"module dimension {rank_n * ng} at degree {n} exceeds ceiling {max_module_dim}"
                )
            res.ranks.append(rank_n)
            res.gen_images.append(gens.astype(np.int8))
            res.dmax = n
            if n < dmax:
                kernel = _kernel_rows(res.solver(n))
        return res

    def _minimal_generators(self, kernel_rows: np.ndarray):
        """Reduced basis of kernel / (augmentation ideal * kernel).

        The radical of the kernel is spanned by (g - 1) v over the group
        generators g and kernel basis vectors v (the augmentation ideal is
        the one-sided ideal on the g - 1).  Generators are the pivot rows of
        the reduced echelon form of the kernel reduced modulo the radical --
        the deterministic 'first complement basis'.
        """
        p = self.p
        ng = self.group.order
        n_big = kernel_rows.shape[1]
        t = self._act()
        blocks = []
        for gen in self.group.generators():
            gi = gen.index
            perm = (np.arange(n_big) // ng) * ng + t[np.arange(n_big) % ng, gi]
            blocks.append((kernel_rows[:, perm] - kernel_rows) % p)
        radical = np.concatenate(blocks, axis=0)
        rad_r, rad_rank, rad_piv = rref(radical, p)
        reduced = (kernel_rows - mm(kernel_rows[:, rad_piv], rad_r[:rad_rank], p)) % p
        gens_r, gens_rank, _ = rref(reduced, p)
        return gens_r[:gens_rank], rad_rank

    # -- contracting homotopy --------------------------------------------------

    def homotopy(self, n: int) -> np.ndarray:
        """s_n : P_n -> P_{n+1} with d_{n+1} s_n + s_{n-1} d_n = id (minus
        the augmentation projection at n = 0)."""
        got = self._homotopy.get(n)
        if got is not None:
            return got
        self.check_degree(n + 1)
        ng = self.group.order
        if n == 0:
            proj = np.zeros((ng, ng), dtype=np.int64)
            proj[self._one_index] = 1  # eta o eps sends v to (sum v) * basis-at-1
            rhs = (np.eye(ng, dtype=np.int64) - proj) % self.p
        else:
            rhs = (np.eye(self.dim(n), dtype=np.int64)
                   - mm(self.homotopy(n - 1), self.full_diff(n), self.p)) % self.p
        sol = self.solver(n + 1).solve_many(rhs)
        if sol is None:
            raise ResolutionError("contracting homotopy system inconsistent")
        self._homotopy[n] = (sol % self.p).astype(np.int8)
        return self._homotopy[n]

    # -- chain-map lifts ---------------------------------------------------------

    def lift(self, cls_: CohClass, levels: int) -> ChainMap:
        """Chain map lifting the class through the resolution, computed and
        cached up to the requested level."""
        self.check_degree(cls_.degree + levels)
        key = cls_.key()
        store = self._lifts.get(key)
        if store is None:
            ng = self.group.order
            images = np.zeros((self.ranks[cls_.degree], ng), dtype=np.int8)
            images[:, self._one_index] = cls_.array() % self.p
            store = [self.expand(images, 1)]
            self._lifts[key] = store
        n = cls_.degree
        while len(store) <= levels:
            i = len(store)  # building f_i
            rhs = mm(store[-1], self.gen_images[n + i].T, self.p)
            sol = self.solver(i).solve_many(rhs)
            if sol is None:
                raise ResolutionError("chain-map lifting system inconsistent")
            store.append(self.expand(sol.T.astype(np.int8), self.ranks[i]))
        return ChainMap(n, store[: levels + 1])

    # -- lift of the resolution mod p^2 -------------------------------------------

    def lifted_mod_p2(self) -> list:
        """Differentials over Z/p^2 lifting d with d~ o d~ = 0 mod p^2.

        Starts from the entrywise lift and clears one degree at a time: the
        defect of a composite is p * C with C defined over F_p, and a
        correction X with d_{n-1} X = C is subtracted as p * X."""
        if self._gen_images2 is not None:
            return self._gen_images2
        p, p2 = self.p, self.p * self.p
        images2: list = [None]
        full2_prev = None
        for n in range(1, self.dmax + 1):
            img = self.gen_images[n].astype(np.int64)
            if n == 1:
                defect = img.sum(axis=1) % p2
                assert not (defect % p).any()
                c = defect // p % p
                x = np.zeros_like(img)
                x[:, self._one_index] = c
            else:
                defect = mm(img, full2_prev.T, p2)
                assert not (defect % p).any()
                c = defect // p % p
                sol = self.solver(n - 1).solve_many(c.T % p)
                assert sol is not None, "mod p^2 correction system must be solvable"
                x = sol.T
            img = (img - p * x) % p2
            images2.append(img.astype(np.int8))
            full2_prev = self.expand(images2[n], self.ranks[n - 1])
        self._gen_images2 = images2
        return images2

    def bock_mat(self, n: int) -> np.ndarray:
        """Matrix of the Bockstein H^n -> H^{n+1} in the coordinate bases:
        the block augmentations of the lifted d_{n+1}, divided by p."""
        got = self._bock.get(n)
        if got is None:
            self.check_degree(n + 1)
            images2 = self.lifted_mod_p2()
            ng = self.group.order
            img = images2[n + 1]
            aug = img.reshape(self.ranks[n + 1], self.ranks[n], ng).sum(axis=2) % (self.p * self.p)
            assert not (aug % self.p).any()
            got = aug // self.p % self.p
            self._bock[n] = got
        return got


def _kernel_rows(solver: Solver) -> np.ndarray:
    """Basis of the kernel as rows, from a factored matrix: the standard
    free-column parametrization of the RREF."""
    n = solver.shape[1]
    p = solver.p
    piv = solver.pivots
    in_piv = np.zeros(n, dtype=bool)
    in_piv[piv] = True
    free = np.nonzero(~in_piv)[0]
    k = np.zeros((len(free), n), dtype=np.int64)
    k[np.arange(len(free)), free] = 1
    if piv:
        k[:, piv] = (-solver.r[: len(piv), free].T) % p
    return k


def compute_minimal_resolution(group: GroupSpec, dmax: int, max_module_dim: int = 8000) -> Resolution:
    return Resolution.compute(group, dmax, max_module_dim)


def betti(resolution: Resolution, n: int) -> int:
    return resolution.betti(n)
