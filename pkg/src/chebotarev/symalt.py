"""Cycle types of S_n and A_n, and the profiles of their intransitive maximal classes.

A permutation lies in a conjugate of S_i x S_{n-i} exactly when some subset
of its cycle lengths sums to i, so membership only depends on cycle type.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import factorial

from sympy.utilities.iterables import partitions as _sympy_partitions

from .engine import GenerationProfile, chebotarev, secondary

MAX_N = 60


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        if any(a < b for a, b in zip(self.parts, self.parts[1:])) or any(p < 1 for p in self.parts):
            raise ValueError(f"not a partition: {self.parts}")

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def even(self) -> bool:
        return (self.n - len(self.parts)) % 2 == 0

    def __str__(self):
        return "+".join(map(str, self.parts))


def partitions(n: int) -> list[Partition]:
    """All partitions of n, largest parts first ([n] comes first)."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be between 1 and {MAX_N}")
    out = []
    for d in _sympy_partitions(n):
        out.append(Partition(tuple(sorted((k for k, m in d.items() for _ in range(m)), reverse=True))))
    return out


def centralizer_order(lam: Partition) -> int:
    """z_lambda = prod_i i^m_i m_i!."""
    z = 1
    for i, m in Counter(lam.parts).items():
        z *= i ** m * factorial(m)
    return z


def class_size(lam: Partition) -> int:
    return factorial(lam.n) // centralizer_order(lam)


def subset_sums(lam: Partition) -> int:
    """Bit set of all sums of sub-multisets of the parts (bit i set iff i is a sum)."""
    bits = 1
    for p in lam.parts:
        bits |= bits << p
    return bits


@dataclass(frozen=True)
class CycleTypeClass:
    partition: Partition

    @cached_property
    def size(self) -> int:
        return class_size(self.partition)

    @property
    def even(self) -> bool:
        return self.partition.even

    @cached_property
    def sumset(self) -> int:
        return subset_sums(self.partition)

    def has_sum(self, i: int) -> bool:
        return bool(self.sumset >> i & 1)


def partial_profile(n: int, variant: str = "alt") -> GenerationProfile:
    """Profile restricted to the intransitive maximal classes (plus A_n for S_n).

    Columns are cycle types.  A_n classes that split in two are kept merged:
    both halves have the same cycle type, hence the same row pattern.
    """
    if variant not in ("sym", "alt"):
        raise ValueError("variant must be 'sym' or 'alt'")
    if variant == "alt" and n < 3:
        raise ValueError("the alternating variant needs n >= 3")
    if variant == "sym" and n < 2:
        raise ValueError("the symmetric variant needs n >= 2")
    types = [CycleTypeClass(lam) for lam in partitions(n)]
    if variant == "alt":
        types = [t for t in types if t.even]
        order = factorial(n) // 2
    else:
        order = factorial(n)
    split = range(1, (n + 1) // 2)  # 1 <= i < n/2
    rows = [tuple(t.has_sum(i) for t in types) for i in split]
    labels = [f"S{i}xS{n - i}" if variant == "sym" else f"(S{i}xS{n - i})^+" for i in split]
    if variant == "sym":
        rows.append(tuple(t.even for t in types))
        labels.append(f"A{n}")
    identity = len(types) - 1  # [1, ..., 1] is listed last
    return GenerationProfile(order, tuple(t.size for t in types), tuple(rows), tuple(labels),
                             identity_column=identity)


def partial_invariants(n: int, variant: str = "alt") -> tuple[Fraction, Fraction]:
    P = partial_profile(n, variant)
    return chebotarev(P), secondary(P)
