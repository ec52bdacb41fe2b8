"""Subgroup lattice of a small permutation group.

Subgroups are found up to conjugacy.  Starting from the trivial subgroup,
each class representative R is joined with one element from every right
coset Rx (the join <R, x> only depends on the coset), skipping cosets that
are conjugate under the normaliser of R.  Any subgroup K arises this way
from a maximal subgroup of K, so the search is complete.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import numpy as np

from .groups import GroupError, PermGroup

MAX_SUBGROUPS = 200_000
MAX_MAXIMAL_CLASSES = 30


class LatticeError(GroupError):
    pass


@dataclass(frozen=True, eq=False)
class SubgroupSet:
    """A subgroup given by the sorted indices of its elements."""

    members: np.ndarray
    ambient_order: int

    @classmethod
    def from_elements(cls, G: PermGroup, elements, check: bool = True) -> "SubgroupSet":
        members = np.unique(np.asarray(list(elements), dtype=np.int64))
        if check:
            if members.size == 0 or members[0] != 0:
                raise LatticeError("subgroup must contain the identity")
            inside = np.zeros(G.order, dtype=bool)
            inside[members] = True
            if not inside[G.mult[np.ix_(members, members)]].all():
                raise LatticeError("element set is not closed under products")
        return cls(members, G.order)

    @property
    def size(self) -> int:
        return int(self.members.size)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.ambient_order, dtype=bool)
        m[self.members] = True
        return m

    @cached_property
    def key(self) -> bytes:
        return np.packbits(self.mask).tobytes()

    def __contains__(self, i) -> bool:
        return bool(self.mask[int(i)])

    def __len__(self):
        return self.size

    def __eq__(self, other):
        return isinstance(other, SubgroupSet) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"SubgroupSet(size={self.size})"


@dataclass(eq=False)
class SubgroupClass:
    rep: SubgroupSet
    generators: tuple[int, ...]
    conjugates: list[bytes] = field(repr=False)
    maximal: bool = False

    @property
    def orbit_size(self) -> int:
        return len(self.conjugates)


@dataclass(frozen=True, eq=False)
class MaximalClassList:
    reps: tuple[SubgroupSet, ...]
    class_orbit_sizes: tuple[int, ...]

    def __len__(self):
        return len(self.reps)


def _closure(G: PermGroup, start: np.ndarray, gens, limit: int):
    """Subgroup generated by the subgroup ``start`` and ``gens``.

    Returns None as soon as it is known to have more than ``limit`` elements.
    """
    inside = np.zeros(G.order, dtype=bool)
    inside[start] = True
    mult = G.mult
    gens = np.asarray(gens, dtype=np.int64)
    if start.size == 1:
        # grow by squaring the element set while that stays cheap
        current = np.unique(np.concatenate([start, gens]))
        while current.size <= 1024:
            inside[current] = True
            nxt = np.unique(mult[np.ix_(current, current)])
            if nxt.size > limit:
                return None
            if nxt.size == current.size:
                return inside
            current = nxt
        inside[current] = True
        start = current
    count = start.size
    frontier = start
    while frontier.size:
        prod = mult[np.ix_(frontier, gens)].ravel()
        new = np.unique(prod[~inside[prod]])
        count += new.size
        if count > limit:
            return None
        inside[new] = True
        frontier = new
    return inside


def _coprime_powers(G: PermGroup, x: int) -> np.ndarray:
    powers = [0, x]
    while powers[-1] != 0:
        powers.append(int(G.mult[powers[-1], x]))
    order = len(powers) - 1
    return np.array([powers[k] for k in range(1, order + 1) if gcd(k, order) == 1], dtype=np.int64)


def _conjugate_members(G: PermGroup, members: np.ndarray, g: int) -> np.ndarray:
    return np.sort(G.conjugate_set(members, g))


class SubgroupLattice:
    """All subgroups of G, organised into conjugacy classes."""

    def __init__(self, G: PermGroup, max_subgroups: int = MAX_SUBGROUPS):
        self.G = G
        self.max_subgroups = max_subgroups
        self.classes: list[SubgroupClass] = []
        self._known: dict[bytes, int] = {}
        self._count = 0
        self._build()

    def _register(self, inside: np.ndarray, gens) -> None:
        G = self.G
        members = np.flatnonzero(inside)
        # conjugates by breadth-first search under generator conjugation,
        # remembering a conjugating element so the generators can follow
        first = (members, 0)
        seen = {np.packbits(inside).tobytes(): first}
        queue = [first]
        for mem, h in queue:
            for g in G.generator_indices:
                conj = _conjugate_members(G, mem, g)
                m = np.zeros(G.order, dtype=bool)
                m[conj] = True
                key = np.packbits(m).tobytes()
                if key not in seen:
                    item = (conj, int(G.mult[h, g]))
                    seen[key] = item
                    queue.append(item)
        self._count += len(seen)
        if self._count > self.max_subgroups:
            raise LatticeError(f"subgroup cap exceeded: more than {self.max_subgroups} subgroups")
        rep_key = min(seen, key=lambda k: tuple(seen[k][0]))
        rep_members, h = seen[rep_key]
        rep_gens = tuple(int(x) for x in G.conjugate_set(np.asarray(gens, dtype=np.int64), h)) if gens else ()
        idx = len(self.classes)
        for key in seen:
            self._known[key] = idx
        self.classes.append(SubgroupClass(SubgroupSet(rep_members, G.order), rep_gens, list(seen)))

    def _build(self) -> None:
        G = self.G
        N = G.order
        trivial = np.zeros(N, dtype=bool)
        trivial[0] = True
        self._register(trivial, ())
        i = 0
        while i < len(self.classes):
            cls = self.classes[i]
            i += 1
            R = cls.rep.members
            if R.size == N:
                continue
            normaliser = self._normaliser(R)
            done = cls.rep.mask.copy()
            proper_join = False
            for x in range(N):
                if done[x]:
                    continue
                # <R, y> = <R, x> for y in R x^k with k prime to the order of x
                gen_powers = _coprime_powers(G, x)
                coset = G.mult[np.ix_(R, gen_powers)].ravel().astype(np.int64)
                orbit = G.mult[G.mult[np.ix_(G.inv[normaliser], coset)], normaliser[:, None]]
                done[orbit.ravel()] = True
                inside = _closure(G, R, cls.generators + (x,), N // 2)
                if inside is None:
                    continue
                proper_join = True
                key = np.packbits(inside).tobytes()
                if key not in self._known:
                    self._register(inside, cls.generators + (x,))
            cls.maximal = not proper_join
        whole = np.ones(N, dtype=bool)
        if np.packbits(whole).tobytes() not in self._known:
            self._register(whole, G.generator_indices)
        self.classes.sort(key=lambda c: (c.rep.size, tuple(c.rep.members)))
        self._known = {k: j for j, c in enumerate(self.classes) for k in c.conjugates}

    def _normaliser(self, R: np.ndarray) -> np.ndarray:
        G = self.G
        mask = np.zeros(G.order, dtype=bool)
        mask[R] = True
        allg = np.arange(G.order)
        conj = G.mult[G.mult[np.ix_(G.inv[allg], R)], allg[:, None]]
        return np.flatnonzero(mask[conj].all(axis=1))

    @property
    def subgroup_count(self) -> int:
        return sum(c.orbit_size for c in self.classes)

    def maximal(self) -> list[SubgroupClass]:
        if self.G.order == 1:
            return []
        return [c for c in self.classes if c.maximal]

    def members_of(self, key: bytes) -> np.ndarray:
        bits = np.unpackbits(np.frombuffer(key, dtype=np.uint8), count=self.G.order)
        return np.flatnonzero(bits)


def lattice(G: PermGroup, max_subgroups: int = MAX_SUBGROUPS) -> SubgroupLattice:
    """The (cached) subgroup lattice of G."""
    cached = G.__dict__.get("_lattice")
    if cached is None:
        cached = SubgroupLattice(G, max_subgroups)
        G.__dict__["_lattice"] = cached
    return cached


def all_subgroups(G: PermGroup, max_subgroups: int = MAX_SUBGROUPS) -> list[SubgroupSet]:
    L = lattice(G, max_subgroups)
    out = []
    for c in L.classes:
        for key in c.conjugates:
            out.append(SubgroupSet(L.members_of(key), G.order))
    return out


def maximal_classes(G: PermGroup, max_classes: int = MAX_MAXIMAL_CLASSES,
                    max_subgroups: int = MAX_SUBGROUPS) -> MaximalClassList:
    mx = lattice(G, max_subgroups).maximal()
    if len(mx) > max_classes:
        raise LatticeError(
            f"too many maximal classes: {len(mx)} exceeds the limit of {max_classes}")
    return MaximalClassList(tuple(c.rep for c in mx), tuple(c.orbit_size for c in mx))


def frattini_subgroup(G: PermGroup, max_subgroups: int = MAX_SUBGROUPS) -> SubgroupSet:
    L = lattice(G, max_subgroups)
    mask = np.ones(G.order, dtype=bool)
    for c in L.maximal():
        for key in c.conjugates:
            mask &= np.unpackbits(np.frombuffer(key, dtype=np.uint8), count=G.order).astype(bool)
    return SubgroupSet(np.flatnonzero(mask), G.order)


def intersection_matrix(G: PermGroup, classes=None, maximals: MaximalClassList | None = None):
    """Generation profile of G: which conjugacy classes meet which maximal classes."""
    from .engine import GenerationProfile

    classes = classes if classes is not None else G.conjugacy
    maximals = maximals if maximals is not None else maximal_classes(G)
    k = len(classes)
    rows = []
    for H in maximals.reps:
        row = np.zeros(k, dtype=bool)
        row[classes.class_of[H.members]] = True
        rows.append(tuple(bool(b) for b in row))
    labels = tuple(f"M{j}(order {H.size})" for j, H in enumerate(maximals.reps))
    return GenerationProfile(
        order=G.order,
        class_sizes=tuple(classes.class_sizes),
        matrix=tuple(rows),
        labels=labels,
        orbit_sizes=tuple(maximals.class_orbit_sizes),
        identity_column=int(classes.class_of[0]),
    )


def generation_profile(G: PermGroup, max_classes: int = MAX_MAXIMAL_CLASSES,
                       max_subgroups: int = MAX_SUBGROUPS):
    return intersection_matrix(G, G.conjugacy, maximal_classes(G, max_classes, max_subgroups))
