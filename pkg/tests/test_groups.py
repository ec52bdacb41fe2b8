import numpy as np
import pytest

from chebotarev.groups import (
    GroupError, OrderCapExceeded, abelian, alternating, build_group,
    coset_action, cyclic, direct_product, elementary_abelian, enumerate_elements,
    expected_order, perm_compose, perm_inverse, psl2, sl2, symmetric,
)
from chebotarev.lattice import SubgroupSet


def test_compose_and_inverse():
    assert perm_compose((1, 0), (1, 0)) == (0, 1)
    b = (2, 0, 3, 1)
    assert perm_compose((0, 1, 2, 3), b) == b
    assert perm_compose((1, 2, 0), (1, 2, 0)) == (2, 0, 1)
    assert perm_inverse((0, 1, 2)) == (0, 1, 2)
    assert perm_inverse((1, 0)) == (1, 0)
    assert perm_inverse((1, 2, 0)) == (2, 0, 1)
    with pytest.raises(GroupError):
        perm_compose((0, 1), (0, 1, 2))


def test_enumerate_elements():
    assert len(enumerate_elements([(1, 2, 0)])) == 3
    S4 = enumerate_elements([(1, 0, 2, 3), (1, 2, 3, 0)])
    assert len(S4) == 24 and S4[0] == (0, 1, 2, 3)
    assert len(psl2(5).elements) == 60
    with pytest.raises(OrderCapExceeded, match="5"):
        enumerate_elements([(1, 0, 2, 3), (1, 2, 3, 0)], cap=5)
    with pytest.raises(GroupError):
        enumerate_elements([(0, 0, 1)])


@pytest.mark.parametrize("spec", [
    {"family": "cyclic", "n": 9},
    {"family": "dihedral", "n": 5},
    {"family": "dihedral", "order": 12},
    {"family": "symmetric", "n": 5},
    {"family": "alternating", "n": 6},
    {"family": "elementary_abelian", "p": 3, "k": 3},
    {"family": "abelian", "factors": [2, 4]},
    {"family": "psl2", "p": 2},
    {"family": "psl2", "p": 7},
    {"family": "psl2", "p": 11},
    {"family": "sl2", "p": 5},
    {"family": "affine", "p": 5},
    {"family": "affine", "p": 13},
    {"family": "borel3", "p": 3},
    {"family": "direct_product", "factors": [{"family": "alternating", "n": 5},
                                              {"family": "cyclic", "n": 2}]},
    {"family": "generators", "degree": 4, "generators": [[1, 0, 2, 3], [1, 2, 3, 0]]},
])
def test_family_orders_and_class_invariants(spec):
    G = build_group(spec)
    want = expected_order(spec)
    if want is not None:
        assert G.order == want
    assert G.elements[0] == tuple(range(G.degree))
    ct = G.conjugacy
    assert sum(ct.class_sizes) == G.order
    assert all(G.order % s == 0 for s in ct.class_sizes)
    assert ct.class_of[0] == 0 and ct.class_sizes[0] == 1
    for rep in ct.class_reps:
        for g in G.generator_indices:
            conj = G.conjugate_set(np.array([rep]), g)[0]
            assert ct.class_of[conj] == ct.class_of[rep]


def test_named_orders():
    assert build_group({"family": "psl2", "p": 7}).order == 168
    assert build_group({"family": "affine", "p": 5}).order == 20
    assert build_group({"family": "borel3", "p": 3}).order == 108


def test_class_sizes():
    assert sorted(symmetric(3).conjugacy.class_sizes) == [1, 2, 3]
    assert sorted(build_group({"family": "affine", "p": 5}).conjugacy.class_sizes) == [1, 4, 5, 5, 5]
    assert sorted(alternating(5).conjugacy.class_sizes) == [1, 12, 12, 15, 20]


def test_multiplication_table_matches_composition():
    G = psl2(7)
    rng = np.random.default_rng(0)
    for a, b in rng.integers(0, G.order, size=(50, 2)):
        assert G.mult[a, b] == G.index(perm_compose(G.elements[a], G.elements[b]))
        assert G.mult[a, G.inv[a]] == 0


def test_deterministic_ordering():
    a = build_group({"family": "psl2", "p": 11})
    b = build_group({"family": "psl2", "p": 11})
    assert a.elements == b.elements
    assert np.array_equal(a.conjugacy.class_of, b.conjugacy.class_of)


def test_coset_action():
    Z4 = cyclic(4)
    N = [0, Z4.index(perm_compose(Z4.generators[0], Z4.generators[0]))]
    assert coset_action(Z4, N).order == 2
    S4 = symmetric(4)
    A4 = [i for i, p in enumerate(S4.elements) if _even(p)]
    Q = coset_action(S4, A4)
    assert Q.order == 2 and len(Q.conjugacy) <= len(S4.conjugacy)
    SL = sl2(5)
    minus = SL.index(_minus_identity(SL))
    assert coset_action(SL, [0, minus]).order == 60


def test_coset_action_rejects_non_normal():
    S3 = symmetric(3)
    t = S3.index((1, 0, 2))
    with pytest.raises(GroupError, match="normal"):
        coset_action(S3, [0, t])
    with pytest.raises(GroupError, match="subgroup"):
        coset_action(S3, [0, S3.index((1, 2, 0))])


def test_direct_product():
    assert direct_product(cyclic(2), cyclic(3)).order == 6
    V = direct_product(cyclic(2), cyclic(2))
    assert V.order == 4 and sorted(V.conjugacy.class_sizes) == [1, 1, 1, 1]
    assert direct_product(alternating(5), cyclic(2)).order == 120
    with pytest.raises(OrderCapExceeded):
        direct_product(alternating(5), alternating(5), cap=1000)


def test_abelian_accepts_noncanonical_factors():
    assert abelian([6, 4]).order == 24
    assert abelian([1]).order == 1
    assert elementary_abelian(2, 2).degree == 4


@pytest.mark.parametrize("spec", [
    {"family": "psl2", "p": 4},
    {"family": "affine", "p": 9},
    {"family": "cyclic", "n": 0},
    {"family": "symmetric", "n": 8},
    {"family": "bogus"},
    {"family": "psl2"},
    {"family": "affine", "p": 7, "index": 4},
])
def test_invalid_specs(spec):
    with pytest.raises(GroupError):
        build_group(spec)


def _even(p):
    seen, parity = set(), 0
    for i in range(len(p)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        parity += length - 1
    return parity % 2 == 0


def _minus_identity(SL):
    # -I swaps each nonzero vector v with -v
    import itertools
    p = 5
    vecs = [v for v in itertools.product(range(p), repeat=2) if any(v)]
    index = {v: i for i, v in enumerate(vecs)}
    return tuple(index[((-a) % p, (-b) % p)] for a, b in vecs)


def test_subgroup_set_validation():
    S3 = symmetric(3)
    H = SubgroupSet.from_elements(S3, [0, S3.index((1, 2, 0)), S3.index((2, 0, 1))])
    assert H.size == 3 and 0 in H
    with pytest.raises(GroupError):
        SubgroupSet.from_elements(S3, [0, S3.index((1, 2, 0))])
