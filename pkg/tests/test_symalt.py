from fractions import Fraction
from math import factorial

import pytest

from chebotarev.engine import chebotarev, partial_bounds, secondary
from chebotarev.lattice import maximal_classes
from chebotarev.symalt import (
    Partition, class_size, partial_invariants, partial_profile, partitions, subset_sums,
)

from conftest import group, profile


def test_partitions():
    assert len(partitions(4)) == 5
    assert len(partitions(5)) == 7
    assert len(partitions(20)) == 627
    assert partitions(4)[0].parts == (4,) and partitions(4)[-1].parts == (1, 1, 1, 1)
    with pytest.raises(ValueError):
        partitions(61)
    with pytest.raises(ValueError):
        Partition((1, 2))


def test_class_size():
    assert class_size(Partition((6,))) == factorial(5)
    assert class_size(Partition((2, 1, 1))) == 6
    for n in range(1, 11):
        assert sum(class_size(p) for p in partitions(n)) == factorial(n)


def test_subset_sums():
    def members(bits):
        return {i for i in range(bits.bit_length()) if bits >> i & 1}
    assert members(subset_sums(Partition((5,)))) == {0, 5}
    assert members(subset_sums(Partition((2, 2)))) == {0, 2, 4}
    assert members(subset_sums(Partition((3, 1, 1)))) == {0, 1, 2, 3, 4, 5}
    for p in partitions(9):
        s = members(subset_sums(p))
        assert {0, 9} <= s and all(9 - i in s for i in s)


def test_profiles():
    P5 = partial_profile(5, "alt")
    assert P5.rows == 2
    assert partial_invariants(5, "alt") == (Fraction(5, 2), 10)
    assert partial_invariants(3, "alt") == (Fraction(3, 2), 3)
    assert partial_profile(3, "alt").rows == 1
    assert partial_invariants(2, "sym") == (2, 6)
    for n in range(3, 15):
        for variant in ("sym", "alt"):
            P = partial_profile(n, variant)
            assert sum(P.class_densities) == 1
            assert P.rows == (n + 1) // 2 - 1 + (variant == "sym")
    with pytest.raises(ValueError):
        partial_profile(2, "alt")
    with pytest.raises(ValueError):
        partial_profile(5, "other")


def test_even_n_excludes_middle_split():
    P = partial_profile(6, "alt")
    assert P.rows == 2


def _intransitive_rows(G, n):
    """Maximal classes whose representative has exactly two orbits of sizes i != n - i,
    plus the index-two subgroup."""
    rows = []
    for r, H in enumerate(maximal_classes(G).reps):
        if H.size * 2 == G.order:
            rows.append(r)
            continue
        orbits = _orbit_sizes(G, H)
        if len(orbits) == 2 and orbits[0] != orbits[1]:
            rows.append(r)
    return rows


def _orbit_sizes(G, H):
    seen, sizes = set(), []
    for start in range(G.degree):
        if start in seen:
            continue
        orbit = {G.elements[h][start] for h in H.members}
        seen |= orbit
        sizes.append(len(orbit))
    return sorted(sizes)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_symmetric_shortcut_matches_lattice(n):
    G = group(family="symmetric", n=n)
    P = profile(family="symmetric", n=n)
    M = _intransitive_rows(G, n)
    pb = partial_bounds(P, M, p_M=1)
    assert (pb.e1, pb.e2) == partial_invariants(n, "sym")
    assert pb.e1 <= chebotarev(P)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_alternating_shortcut_matches_lattice(n):
    G = group(family="alternating", n=n)
    P = profile(family="alternating", n=n)
    M = [r for r in _intransitive_rows(G, n) if maximal_classes(G).reps[r].size * 2 != G.order]
    pb = partial_bounds(P, M, p_M=1)
    assert (pb.e1, pb.e2) == partial_invariants(n, "alt")
    assert pb.e1 <= chebotarev(P) and pb.e2 <= secondary(P)
