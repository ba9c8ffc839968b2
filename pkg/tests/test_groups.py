import numpy as np
import pytest

from pcoh.groups import (
    GroupError,
    coset_transversal,
    cyclic,
    elementary_abelian,
    make_pn,
    parse_group_file,
    subgroup,
)


def test_p33_order_and_exponent():
    g = make_pn(3, 3)
    assert g.order == 27
    for x in g.elements():
        if x != g.identity():
            assert g.element_order(x) == 3


def test_p34_central_generator_order():
    g = make_pn(3, 4)
    assert g.order == 81
    c = g.generator("C")
    assert g.element_order(c) == 9


def test_p53_order():
    assert make_pn(5, 3).order == 125


def test_make_pn_rejects_bad_arguments():
    with pytest.raises(GroupError):
        make_pn(2, 3)
    with pytest.raises(GroupError):
        make_pn(4, 3)
    with pytest.raises(GroupError):
        make_pn(3, 2)


def test_multiply_collection_rule_p3():
    g = make_pn(3, 3)
    a, b, c = g.generators()
    # B * A = A * B * C^-1
    assert (b * a).exps == (1, 1, 2)
    assert (b * a) == a * b * c ** -1


def test_multiply_identity():
    g = make_pn(5, 3)
    for x in list(g.elements())[:10]:
        assert x * g.identity() == x
        assert g.identity() * x == x


def test_commutator_brute_force():
    # [A,B] = C, checked with inverses found by table search
    g = make_pn(3, 3)
    mul = g.mul_table()
    e = g.identity().index
    a, b, c = (x.index for x in g.generators())

    def inv(x):
        return int(np.nonzero(mul[x] == e)[0][0])

    comm = mul[mul[mul[inv(a), inv(b)], a], b]
    assert comm == c


@pytest.mark.parametrize("p,n", [(3, 3), (3, 4), (5, 3), (3, 5)])
def test_pn_associative(p, n):
    assert make_pn(p, n).is_associative()


def test_normal_form_uniqueness():
    g = make_pn(3, 4)
    seen = {x.exps for x in g.elements()}
    assert len(seen) == g.order


@pytest.mark.parametrize("p,n", [(3, 3), (5, 3)])
def test_lagrange_power(p, n):
    g = make_pn(p, n)
    for x in list(g.elements())[:: max(1, g.order // 20)]:
        assert x ** g.order == g.identity()


def test_center_contains_c():
    g = make_pn(5, 3)
    c = g.generator("C")
    assert all(c * x == x * c for x in g.elements())


def test_subgroup_bc_is_elementary_abelian():
    g = make_pn(3, 3)
    emb = subgroup(g, [g.generator("B"), g.generator("C")])
    h = emb.subgroup
    assert h.order == 9
    assert emb.index == 3
    for x in h.elements():
        assert h.element_order(x) in (1, 3)
        for y in h.elements():
            assert x * y == y * x
    assert h.is_associative()


def test_subgroup_injection_is_homomorphism():
    g = make_pn(3, 4)
    emb = subgroup(g, [g.generator("B"), g.generator("C")])
    h = emb.subgroup
    for x in h.elements():
        for y in h.elements():
            assert emb.inject(x * y) == emb.inject(x) * emb.inject(y)


def test_subgroup_trivial():
    g = make_pn(3, 3)
    emb = subgroup(g, [g.identity()])
    assert emb.subgroup.order == 1
    assert len(emb.transversal) == g.order


def test_subgroup_of_a_and_b_is_everything():
    g = make_pn(3, 3)
    emb = subgroup(g, [g.generator("A"), g.generator("B")])
    assert emb.subgroup.order == g.order
    assert emb.transversal == [g.identity()]


def test_subgroup_nonabelian_class_two():
    # inside P(4): <A, B> closes up over C^3 and is extraspecial of order 27
    g = make_pn(3, 4)
    emb = subgroup(g, [g.generator("A"), g.generator("B")])
    h = emb.subgroup
    assert h.order == 27
    assert h.is_associative()
    for x in h.elements():
        for y in h.elements():
            assert emb.inject(x * y) == emb.inject(x) * emb.inject(y)


def test_transversal_bc_is_powers_of_a():
    g = make_pn(3, 3)
    emb = subgroup(g, [g.generator("B"), g.generator("C")])
    a = g.generator("A")
    assert coset_transversal(emb) == [g.identity(), a, a * a]


def test_transversal_distinct_cosets():
    g = make_pn(5, 3)
    emb = subgroup(g, [g.generator("A"), g.generator("C")])
    reps = coset_transversal(emb)
    assert len(reps) * emb.subgroup.order == g.order
    hset = {emb.inject(h).index for h in emb.subgroup.elements()}
    mul = g.mul_table()
    cosets = [frozenset(int(mul[t.index, s]) for s in hset) for t in reps]
    assert len(set(cosets)) == len(reps)


def test_decompositions_cover():
    g = make_pn(3, 3)
    emb = subgroup(g, [g.generator("B"), g.generator("C")])
    slot, sub = emb.decompose_left()
    assert (slot >= 0).all() and (sub >= 0).all()
    for gi in range(g.order):
        t = emb.transversal[slot[gi]]
        h = emb.inject(list(emb.subgroup.elements())[sub[gi]])
        assert (t * h).index == gi
    slot, sub = emb.decompose_right()
    for gi in range(g.order):
        t = emb.transversal[slot[gi]].inverse()
        h = emb.inject(list(emb.subgroup.elements())[sub[gi]])
        assert (h * t).index == gi


def test_cyclic_and_elementary_abelian():
    c9 = cyclic(3, 2)
    assert c9.order == 9 and c9.is_associative()
    v = elementary_abelian(3, 2)
    assert v.order == 9 and v.is_associative()


def test_parse_builtin():
    g = parse_group_file("p = 3\nn = 4\n")
    assert g.order == 81


def test_parse_explicit_matches_builtin():
    text = """
    # P(3) at p = 3, explicitly
    p = 3
    gen A order 3
    gen B order 3
    gen C order 3
    comm [B, A] = C^-1
    """
    g = parse_group_file(text)
    ref = make_pn(3, 3)
    assert g.order == 27
    assert (g.mul_table() == ref.mul_table()).all()


def test_parse_rejects_garbage():
    with pytest.raises(GroupError):
        parse_group_file("p = 3\nwhat is this\n")
    with pytest.raises(GroupError):
        parse_group_file("gen A order 3\n")


def test_parse_rejects_inconsistent_presentation():
    # commutator value of full order on a generator that itself appears in
    # a nontrivial commutator cannot be central
    text = """
    p = 3
    gen A order 3
    gen B order 3
    comm [B, A] = A
    """
    with pytest.raises(GroupError):
        parse_group_file(text)


def test_enumeration_hash_stable():
    g1 = make_pn(3, 3)
    g2 = make_pn(3, 3)
    assert g1.enumeration_hash() == g2.enumeration_hash()
    assert g1.enumeration_hash() != make_pn(3, 4).enumeration_hash()
