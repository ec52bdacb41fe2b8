"""Permutation groups small enough to enumerate.

Elements are stored as rows of an integer array in breadth-first discovery
order, so element indices (and everything derived from them) are stable
across runs.  The multiplication table is built lazily and vectorised.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime
from sympy.ntheory import primitive_root

DEFAULT_MAX_ORDER = int(os.environ.get("CHEBOTAREV_MAX_ORDER", "5000"))


class GroupError(ValueError):
    """Invalid group specification or operation."""


class OrderCapExceeded(GroupError):
    def __init__(self, cap: int):
        super().__init__(f"order cap exceeded: group has more than {cap} elements")
        self.cap = cap


Perm = tuple  # image tuple, i -> perm[i]


def perm_compose(a: Sequence[int], b: Sequence[int]) -> Perm:
    """Return the permutation ``i -> a(b(i))``."""
    if len(a) != len(b):
        raise GroupError(f"degree mismatch: {len(a)} != {len(b)}")
    return tuple(a[j] for j in b)


def perm_inverse(a: Sequence[int]) -> Perm:
    inv = [0] * len(a)
    for i, j in enumerate(a):
        inv[j] = i
    return tuple(inv)


def _check_perm(p: Sequence[int], degree: int) -> Perm:
    p = tuple(int(x) for x in p)
    if len(p) != degree or sorted(p) != list(range(degree)):
        raise GroupError(f"not a permutation of 0..{degree - 1}: {list(p)}")
    return p


def enumerate_elements(gens: Sequence[Sequence[int]], cap: int = DEFAULT_MAX_ORDER,
                       degree: int | None = None) -> list[Perm]:
    """Breadth-first closure of ``gens`` starting at the identity.

    Children of ``x`` are ``g∘x`` for the generators in declaration order;
    elements are listed by first discovery.
    """
    if cap < 1:
        raise GroupError("cap must be at least 1")
    if degree is None:
        if not gens:
            raise GroupError("degree required when there are no generators")
        degree = len(gens[0])
    gens = [_check_perm(g, degree) for g in gens]
    identity = tuple(range(degree))
    seen = {identity: 0}
    elements = [identity]
    i = 0
    while i < len(elements):
        x = elements[i]
        for g in gens:
            y = tuple(g[j] for j in x)
            if y not in seen:
                if len(elements) >= cap:
                    raise OrderCapExceeded(cap)
                seen[y] = len(elements)
                elements.append(y)
        i += 1
    return elements


@dataclass(frozen=True, eq=False)
class ConjugacyTable:
    class_reps: tuple[int, ...]
    class_sizes: tuple[int, ...]
    class_of: np.ndarray  # element index -> class index

    def __len__(self):
        return len(self.class_reps)


@dataclass(eq=False)
class PermGroup:
    """A permutation group together with its full element list."""

    degree: int
    generators: tuple[Perm, ...]
    name: str = ""
    elements: list[Perm] = field(default=None, repr=False)
    cap: int = field(default=DEFAULT_MAX_ORDER, repr=False)

    def __post_init__(self):
        if self.degree < 1:
            raise GroupError("degree must be at least 1")
        self.generators = tuple(_check_perm(g, self.degree) for g in self.generators)
        if self.elements is None:
            self.elements = enumerate_elements(self.generators, self.cap, self.degree)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __repr__(self):
        return f"PermGroup({self.name or '?'}, degree={self.degree}, order={self.order})"

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.elements, dtype=np.int32).reshape(self.order, self.degree)

    @cached_property
    def _lookup(self):
        # images on a short base determine an element; encode them as one int64
        arr = self.array.astype(np.int64)
        n = self.order
        base: list[int] = []
        keys = np.zeros(n, dtype=np.int64)
        radix = 1
        for pt in range(self.degree):
            if len(np.unique(keys)) == n:
                break
            trial = keys + arr[:, pt] * radix
            if len(np.unique(trial)) > len(np.unique(keys)):
                base.append(pt)
                keys = trial
                radix *= self.degree
                if radix > 2**62 // max(self.degree, 2):
                    raise GroupError("element encoding overflow")
        order = np.argsort(keys, kind="stable")
        return np.array(base, dtype=np.int64), keys[order], order

    def _encode(self, rows: np.ndarray) -> np.ndarray:
        base, _, _ = self._lookup
        radix = self.degree ** np.arange(len(base), dtype=np.int64)
        return (rows[..., base].astype(np.int64) * radix).sum(axis=-1)

    def index_of_rows(self, rows: np.ndarray) -> np.ndarray:
        _, sorted_keys, order = self._lookup
        keys = self._encode(np.atleast_2d(rows))
        pos = np.searchsorted(sorted_keys, keys)
        pos = np.minimum(pos, len(sorted_keys) - 1)
        idx = order[pos]
        if not np.array_equal(self.array[idx], np.atleast_2d(rows)):
            raise GroupError("permutation is not an element of the group")
        return idx

    def index(self, perm: Sequence[int]) -> int:
        return int(self.index_of_rows(np.asarray(perm, dtype=np.int32))[0])

    @cached_property
    def mult(self) -> np.ndarray:
        """``mult[a, b]`` is the index of ``a∘b``."""
        # a product is determined by its images of the base points
        base, sorted_keys, order = self._lookup
        arr = self.array.astype(np.int64)
        n = self.order
        radix = self.degree ** np.arange(len(base), dtype=np.int64)
        dtype = np.int16 if n < 2**15 else np.int32
        table = np.empty((n, n), dtype=dtype)
        for b in range(n):
            keys = arr[:, arr[b, base]] @ radix
            table[:, b] = order[np.searchsorted(sorted_keys, keys)]
        return table

    @cached_property
    def inv(self) -> np.ndarray:
        arr = self.array
        rows = np.empty_like(arr)
        rows[np.arange(self.order)[:, None], arr] = np.arange(self.degree)
        return self.index_of_rows(rows)

    @cached_property
    def generator_indices(self) -> tuple[int, ...]:
        return tuple(self.index(g) for g in self.generators)

    def conjugate_set(self, members: np.ndarray, g: int) -> np.ndarray:
        """Indices of ``g^-1 x g`` for x in ``members``."""
        return self.mult[self.mult[self.inv[g], members], g].astype(np.int64)

    @cached_property
    def conjugacy(self) -> ConjugacyTable:
        return conjugacy_classes(self)

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != 0:
            x = int(self.mult[x, i])
            k += 1
        return k


def conjugacy_classes(G: PermGroup) -> ConjugacyTable:
    """Orbits of the conjugation action, ordered by smallest member index."""
    n = G.order
    class_of = np.full(n, -1, dtype=np.int64)
    reps, sizes = [], []
    gens = G.generator_indices
    inv, mult = G.inv, G.mult
    for x in range(n):
        if class_of[x] >= 0:
            continue
        c = len(reps)
        class_of[x] = c
        orbit = [x]
        for y in orbit:
            for g in gens:
                z = int(mult[mult[inv[g], y], g])
                if class_of[z] < 0:
                    class_of[z] = c
                    orbit.append(z)
        reps.append(x)
        sizes.append(len(orbit))
    class_of.setflags(write=False)
    return ConjugacyTable(tuple(reps), tuple(sizes), class_of)


def coset_action(G: PermGroup, N: Iterable[int]) -> PermGroup:
    """Action of G on the left cosets of a normal subgroup N (a copy of G/N)."""
    N = np.unique(np.fromiter(N, dtype=np.int64))
    if N.size == 0 or N[0] != 0:
        raise GroupError("subgroup must contain the identity")
    inN = np.zeros(G.order, dtype=bool)
    inN[N] = True
    mult = G.mult
    if not inN[mult[np.ix_(N, N)]].all():
        raise GroupError("not a subgroup")
    for g in G.generator_indices:
        if not inN[G.conjugate_set(N, g)].all():
            raise GroupError("subgroup is not normal")
    coset_of = np.full(G.order, -1, dtype=np.int64)
    k = 0
    for x in range(G.order):
        if coset_of[x] < 0:
            coset_of[mult[x, N]] = k
            k += 1
    first = np.zeros(k, dtype=np.int64)
    for x in range(G.order - 1, -1, -1):
        first[coset_of[x]] = x
    gens = []
    for g in G.generator_indices:
        gens.append(tuple(int(c) for c in coset_of[mult[g, first]]))
    if not gens:
        gens = [tuple(range(k))]
    name = f"{G.name}/N" if G.name else ""
    return PermGroup(k, tuple(gens), name=name, cap=G.cap)


def direct_product(G1: PermGroup, G2: PermGroup, cap: int | None = None) -> PermGroup:
    cap = cap if cap is not None else max(G1.cap, G2.cap)
    if G1.order * G2.order > cap:
        raise OrderCapExceeded(cap)
    d1, d2 = G1.degree, G2.degree
    gens = [tuple(g) + tuple(range(d1, d1 + d2)) for g in G1.generators]
    gens += [tuple(range(d1)) + tuple(d1 + i for i in h) for h in G2.generators]
    return PermGroup(d1 + d2, tuple(gens), name=f"{G1.name} x {G2.name}", cap=cap)


# ---------------------------------------------------------------- families

def _require_prime(p: int) -> int:
    if not isinstance(p, int) or not isprime(p):
        raise GroupError(f"{p!r} is not a prime")
    return p


def _cycle_on(points: Sequence[int], degree: int) -> Perm:
    img = list(range(degree))
    for a, b in zip(points, list(points[1:]) + [points[0]]):
        img[a] = b
    return tuple(img)


def cyclic(n: int, cap: int = DEFAULT_MAX_ORDER) -> PermGroup:
    if n < 1:
        raise GroupError("cyclic group needs n >= 1")
    gens = (_cycle_on(range(n), n),) if n > 1 else ()
    return PermGroup(n, gens, name=f"Z/{n}", cap=cap)


def dihedral(n: int, cap: int = DEFAULT_MAX_ORDER) -> PermGroup:
    """Dihedral group of order 2n acting on n points (n >= 3)."""
    if n < 3:
        raise GroupError("dihedral group acting on n points needs n >= 3")
    rot = _cycle_on(range(n), n)
    refl = tuple((-i) % n for i in range(n))
    return PermGroup(n, (rot, refl), name=f"D{2 * n}", cap=cap)


def symmetric(n: int, cap: int = DEFAULT_MAX_ORDER) -> PermGroup:
    if n < 1:
        raise GroupError("symmetric group needs n >= 1")
    if n == 1:
        return PermGroup(1, (), name="S1", cap=cap)
    gens = [tuple([1, 0] + list(range(2, n)))]
    if n > 2:
        gens.append(_cycle_on(range(n), n))
    return PermGroup(n, tuple(gens), name=f"S{n}", cap=cap)


def alternating(n: int, cap: int = DEFAULT_MAX_ORDER) -> PermGroup:
    if n < 1:
        raise GroupError("alternating group needs n >= 1")
    if n < 3:
        return PermGroup(n, (), name=f"A{n}", cap=cap)
    gens = [_cycle_on(range(i, i + 3), n) for i in range(n - 2)]
    return PermGroup(n, tuple(gens), name=f"A{n}", cap=cap)


def abelian(factors: Sequence[int], cap: int = DEFAULT_MAX_ORDER) -> PermGroup:
    """Product of cyclic groups, each acting on its own block of points."""
    factors = [int(f) for f in factors]
    if not factors or any(f < 1 for f in factors):
        raise GroupError("abelian group needs a nonempty list of positive factors")
    order = 1
    for f in factors:
        order *= f
    if order > cap:
        raise OrderCapExceeded(cap)
    degree = sum(factors)
    gens, start = [], 0
    for f in factors:
        if f > 1:
            gens.append(_cycle_on(range(start, start + f), degree))
        start += f
    name = " x ".join(f"Z/{f}" for f in factors)
    return PermGroup(degree, tuple(gens), name=name, cap=cap)


def elementary_abelian(p: int, k: int, cap: int = DEFAULT_MAX_ORDER) -> PermGroup:
    _require_prime(p)
    if k < 1:
        raise GroupError("k must be at least 1")
    G = abelian([p] * k, cap=cap)
    G.name = f"F{p}^{k}"
    return G


def psl2(p: int, cap: int = DEFAULT_MAX_ORDER) -> PermGroup:
    """PSL(2, p) on the projective line, points ordered 0..p-1, infinity."""
    _require_prime(p)
    inf = p
    shift = tuple(list((x + 1) % p for x in range(p)) + [inf])
    inv = [inf] + [(-pow(x, -1, p)) % p for x in range(1, p)] + [0]
    return PermGroup(p + 1, (shift, tuple(inv)), name=f"PSL(2,{p})", cap=cap)


def _vector_action(matrices, p: int, dim: int):
    vecs = [v for v in np.ndindex(*([p] * dim)) if any(v)]
    index = {v: i for i, v in enumerate(vecs)}
    gens = []
    for m in matrices:
        m = np.asarray(m) % p
        gens.append(tuple(index[tuple(int(x) for x in (m @ np.array(v)) % p)] for v in vecs))
    return len(vecs), tuple(gens)


def sl2(p: int, cap: int = DEFAULT_MAX_ORDER) -> PermGroup:
    """SL(2, p) acting on the nonzero vectors of F_p^2."""
    _require_prime(p)
    degree, gens = _vector_action([[[1, 1], [0, 1]], [[0, -1], [1, 0]]], p, 2)
    return PermGroup(degree, gens, name=f"SL(2,{p})", cap=cap)


def borel3(p: int, cap: int = DEFAULT_MAX_ORDER) -> PermGroup:
    """Upper triangular matrices of determinant 1 in SL(3, p), on F_p^3 - {0}."""
    _require_prime(p)
    if p ** 3 * (p - 1) ** 2 > cap:
        raise OrderCapExceeded(cap)
    mats = [
        [[1, 1, 0], [0, 1, 0], [0, 0, 1]],
        [[1, 0, 0], [0, 1, 1], [0, 0, 1]],
        [[1, 0, 1], [0, 1, 0], [0, 0, 1]],
    ]
    if p > 2:
        g = primitive_root(p)
        gi = pow(g, -1, p)
        mats.append([[g, 0, 0], [0, gi, 0], [0, 0, 1]])
        mats.append([[1, 0, 0], [0, g, 0], [0, 0, gi]])
    degree, gens = _vector_action(mats, p, 3)
    return PermGroup(degree, gens, name=f"B3({p})", cap=cap)


def affine(p: int, index: int = 1, cap: int = DEFAULT_MAX_ORDER) -> PermGroup:
    """Maps x -> a x + t on F_p with a in the index-``index`` subgroup of F_p^*.

    ``index=1`` gives the full group H_p of order p(p-1).
    """
    _require_prime(p)
    if index < 1 or (p - 1) % index:
        raise GroupError(f"index {index} does not divide p - 1 = {p - 1}")
    gens = [tuple((x + 1) % p for x in range(p))]
    if p > 2 and index < p - 1:
        a = pow(primitive_root(p), index, p)
        gens.append(tuple(a * x % p for x in range(p)))
    name = f"H{p}" if index == 1 else f"C{index} in H{p}"
    return PermGroup(p, tuple(gens), name=name, cap=cap)


def from_generators(degree: int, generators, cap: int = DEFAULT_MAX_ORDER) -> PermGroup:
    return PermGroup(int(degree), tuple(tuple(g) for g in generators), name="<gens>", cap=cap)


def expected_order(spec: dict) -> int | None:
    """Order predicted by the family formula, or None when not a fixed family."""
    fam = spec["family"]
    if fam == "cyclic":
        return spec["n"]
    if fam == "dihedral":
        return 2 * _dihedral_points(spec)
    if fam in ("symmetric", "alternating"):
        from math import factorial
        f = factorial(spec["n"])
        return f if fam == "symmetric" or spec["n"] < 2 else f // 2
    if fam == "elementary_abelian":
        return spec["p"] ** spec["k"]
    if fam == "abelian":
        out = 1
        for f in spec["factors"]:
            out *= f
        return out
    p = spec.get("p")
    if fam == "psl2":
        return p * (p * p - 1) // gcd(2, p - 1)
    if fam == "sl2":
        return p * (p * p - 1)
    if fam == "affine":
        return p * (p - 1) // spec.get("index", 1)
    if fam == "borel3":
        return p ** 3 * (p - 1) ** 2
    if fam == "direct_product":
        a, b = (expected_order(s) for s in _product_parts(spec))
        return None if a is None or b is None else a * b
    return None


def _dihedral_points(spec: dict) -> int:
    if "n" in spec:
        return int(spec["n"])
    if "order" in spec and int(spec["order"]) % 2 == 0:
        return int(spec["order"]) // 2
    raise GroupError("dihedral spec needs 'n' (points) or an even 'order'")


def _product_parts(spec: dict):
    parts = spec.get("factors") or [spec.get("left"), spec.get("right")]
    if len(parts) != 2 or not all(isinstance(s, dict) for s in parts):
        raise GroupError("direct_product needs two group specs")
    return parts


def build_group(spec: dict, cap: int = DEFAULT_MAX_ORDER) -> PermGroup:
    """Construct a group from a JSON-style spec such as ``{"family": "psl2", "p": 7}``."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise GroupError("group spec must be an object with a 'family' key")
    fam = spec["family"]
    try:
        if fam == "cyclic":
            return cyclic(int(spec["n"]), cap)
        if fam == "dihedral":
            return dihedral(_dihedral_points(spec), cap)
        if fam == "symmetric":
            return symmetric(int(spec["n"]), cap)
        if fam == "alternating":
            return alternating(int(spec["n"]), cap)
        if fam == "elementary_abelian":
            return elementary_abelian(int(spec["p"]), int(spec["k"]), cap)
        if fam == "abelian":
            return abelian(spec["factors"], cap)
        if fam == "psl2":
            return psl2(int(spec["p"]), cap)
        if fam == "sl2":
            return sl2(int(spec["p"]), cap)
        if fam == "affine":
            return affine(int(spec["p"]), int(spec.get("index", 1)), cap)
        if fam == "borel3":
            return borel3(int(spec["p"]), cap)
        if fam == "direct_product":
            a, b = (build_group(s, cap) for s in _product_parts(spec))
            return direct_product(a, b, cap)
        if fam == "generators":
            return from_generators(spec["degree"], spec["generators"], cap)
    except KeyError as exc:
        raise GroupError(f"{fam} spec is missing parameter {exc}") from None
    raise GroupError(f"unknown group family {fam!r}")
