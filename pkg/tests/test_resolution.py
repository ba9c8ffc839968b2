import numpy as np
import pytest

from pcoh.groups import cyclic, elementary_abelian, make_pn
from pcoh.linalg import mm
from pcoh.resolution import Resolution, ResolutionError, coh_class

from oracle_bar import bar_cohomology_dims


@pytest.fixture(scope="module")
def res_p33(corpus):
    return corpus["P3@3"]


def test_c3_ranks_all_one(corpus):
    assert corpus["C3"].ranks == [1] * 11


def test_c5_ranks_all_one(corpus):
    assert corpus["C5"].ranks == [1] * 9


def test_c3xc3_ranks(corpus):
    assert corpus["C3xC3"].ranks[:5] == [1, 2, 3, 4, 5]


def test_p3_rank_prefix_matches_basis_statements(corpus):
    # H^1..H^4 have dimensions 2, 4, 6, 7 for both p = 3 and p = 5
    assert corpus["P3@3"].ranks[:5] == [1, 2, 4, 6, 7]


def test_betti_errors(res_p33):
    assert res_p33.betti(0) == 1
    with pytest.raises(ResolutionError):
        res_p33.betti(res_p33.dmax + 1)


@pytest.mark.parametrize("gname,nmax", [("C3", 3), ("C9", 3), ("C3xC3", 3), ("C5", 2)])
def test_ranks_match_bar_brute_force(corpus, gname, nmax):
    r = corpus[gname]
    dims = bar_cohomology_dims(r.group, nmax)
    assert r.ranks[: nmax + 1] == dims


def test_p33_low_degrees_match_bar_brute_force(corpus):
    r = corpus["P3@3"]
    dims = bar_cohomology_dims(r.group, 2)
    assert r.ranks[:3] == dims


@pytest.mark.parametrize("gname", ["C3", "C3xC3", "P3@3", "P4@3", "C5", "P3@5"])
def test_differentials_compose_to_zero(corpus, gname):
    r = corpus[gname]
    for n in range(2, r.dmax + 1):
        assert not mm(r.full_diff(n - 1), r.full_diff(n), r.p).any()


@pytest.mark.parametrize("gname", ["C3", "C3xC3", "P3@3", "P4@3", "C5", "P3@5"])
def test_minimality(corpus, gname):
    r = corpus[gname]
    ng = r.group.order
    for n in range(1, r.dmax + 1):
        aug = r.gen_images[n].reshape(r.ranks[n], r.ranks[n - 1], ng).sum(axis=2) % r.p
        assert not aug.any()


@pytest.mark.parametrize("gname", ["C3xC3", "P3@3"])
def test_exactness(corpus, gname):
    r = corpus[gname]
    # at stage 0: ker(augmentation) = im d_1; higher: ker d_n = im d_{n+1}
    assert r.solver(1).rank == r.group.order - 1
    for n in range(1, r.dmax):
        assert r.dim(n) - r.solver(n).rank == r.solver(n + 1).rank


def test_betti_invariant_under_enumeration_shuffle():
    base = make_pn(3, 3)
    r0 = Resolution.compute(base, 4)

    class Shuffled:
        """Same group, relabelled elements: enough interface for compute()."""

        def __init__(self, g, perm):
            self.g, self.p, self.order = g, g.p, g.order
            self.perm = perm           # new index -> old index
            self.inv_perm = np.argsort(perm)
            self._mul = self.inv_perm[g.mul_table()[np.ix_(perm, perm)]]
            self._inv = self.inv_perm[g.inv_table()[perm]]

        def mul_table(self):
            return self._mul

        def inv_table(self):
            return self._inv

        def identity(self):
            g = self.g

            class E:
                index = int(self.inv_perm[g.identity().index])

            return E()

        def generators(self):
            out = []
            for x in self.g.generators():
                class E:
                    index = int(self.inv_perm[x.index])

                out.append(E())
            return out

    rng = np.random.default_rng(8)
    perm = rng.permutation(base.order)
    r1 = Resolution.compute(Shuffled(base, perm), 4)
    assert r1.ranks == r0.ranks


def test_memory_ceiling_guard():
    with pytest.raises(ResolutionError):
        Resolution.compute(make_pn(3, 3), 4, max_module_dim=27)


def test_contracting_homotopy_identities(corpus):
    r = corpus["P3@3"]
    p = r.p
    ng = r.group.order
    s0 = r.homotopy(0)
    proj = np.zeros((ng, ng), dtype=np.int64)
    proj[r.group.identity().index] = 1
    assert (mm(r.full_diff(1), s0, p) == (np.eye(ng, dtype=np.int64) - proj) % p).all()
    for n in range(1, 3):
        lhs = (mm(r.full_diff(n + 1), r.homotopy(n), p)
               + mm(r.homotopy(n - 1), r.full_diff(n), p)) % p
        assert (lhs == np.eye(r.dim(n), dtype=np.int64)).all()


def test_homotopy_splits_cycles(corpus):
    # for z in ker d_n, d_{n+1}(s_n z) = z
    r = corpus["C3xC3"]
    p = r.p
    n = 2
    from pcoh.linalg import kernel_basis

    k = kernel_basis(r.full_diff(n), p)
    z = k[:, 0]
    sz = mm(r.homotopy(n), z[:, None], p)
    assert (mm(r.full_diff(n + 1), sz, p).ravel() == z).all()


def test_homotopy_on_c3_norm_relation(corpus):
    # d_2 is multiplication by the norm; s_1 produces a preimage of it
    r = corpus["C3"]
    norm = r.full_diff(2)[:, r.gen_columns(2)[0]]
    pre = mm(r.homotopy(1), norm[:, None], 3).ravel()
    assert (mm(r.full_diff(2), pre[:, None], 3).ravel() == norm).all()


def test_unit_lift_is_identity_like(corpus):
    r = corpus["P3@3"]
    cm = r.lift(r.unit(), 3)
    assert r.class_of_map(cm.levels[0], 0) == r.unit()
    for i in range(1, len(cm.levels)):
        assert (mm(r.full_diff(i), cm.levels[i], 3) == mm(cm.levels[i - 1], r.full_diff(i), 3)).all()


@pytest.mark.parametrize("gname", ["P3@3", "C3xC3"])
def test_lift_commuting_squares(corpus, gname):
    r = corpus[gname]
    p = r.p
    for deg in (1, 2):
        for cls in r.basis(deg)[:2]:
            cm = r.lift(cls, 3)
            for i in range(1, len(cm.levels)):
                lhs = mm(r.full_diff(i), cm.levels[i], p)
                rhs = mm(cm.levels[i - 1], r.full_diff(deg + i), p)
                assert (lhs == rhs).all()
    # f_0 realizes the class through the augmentation
    cls = r.basis(1)[0]
    cm = r.lift(cls, 0)
    assert r.class_of_map(cm.levels[0], 1) == cls


def test_lift_degree_budget(corpus):
    r = corpus["C3xC3"]
    with pytest.raises(ResolutionError):
        r.lift(r.basis(1)[0], r.dmax)


def test_mod_p2_lift(corpus):
    for gname in ("C3", "P3@3"):
        r = corpus[gname]
        p, p2 = r.p, r.p**2
        images2 = r.lifted_mod_p2()
        for n in range(1, r.dmax + 1):
            assert ((images2[n] % p) == (r.gen_images[n] % p)).all()
        for n in range(2, r.dmax + 1):
            full_prev = r.expand(images2[n - 1], r.ranks[n - 2])
            comp = mm(images2[n], full_prev.T, p2)
            assert not comp.any()


def test_bockstein_matrices_square_to_zero(corpus):
    r = corpus["P3@3"]
    for n in range(1, 4):
        assert not (r.bock_mat(n + 1) @ r.bock_mat(n) % 3).any()


def test_bockstein_c3_degree1_nonzero(corpus):
    r = corpus["C3"]
    assert r.bock_mat(1).tolist() == [[1]]
