"""Exact Chebotarev invariants from a generation profile.

Every quantity is a signed sum over nonempty sets I of maximal classes of a
function of nu(I), the density of the conjugacy classes met by every class in
I.  The sweep below collapses that sum into integer coefficients indexed by
the numerator of nu(I), so each invariant is a short exact sum afterwards.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .numfmt import format_fixed, format_sig, fraction_json

MAX_ROWS = 30


class ProfileError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GenerationProfile:
    """Class sizes plus the maximal-class x conjugacy-class incidence matrix.

    ``class_sizes`` are integer weights summing to ``order``; the density of
    column i is ``class_sizes[i] / order``.
    """

    order: int
    class_sizes: tuple[int, ...]
    matrix: tuple[tuple[bool, ...], ...]
    labels: tuple[str, ...] | None = None
    orbit_sizes: tuple[int, ...] | None = None
    identity_column: int | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "class_sizes", tuple(int(s) for s in self.class_sizes))
        object.__setattr__(self, "matrix", tuple(tuple(bool(b) for b in r) for r in self.matrix))
        if self.order < 1:
            raise ProfileError("order must be positive")
        if any(s <= 0 for s in self.class_sizes):
            raise ProfileError("class sizes must be positive")
        if sum(self.class_sizes) != self.order:
            raise ProfileError(
                f"class sizes sum to {sum(self.class_sizes)}, not the order {self.order}")
        k = len(self.class_sizes)
        for j, row in enumerate(self.matrix):
            if len(row) != k:
                raise ProfileError(f"row {j} has {len(row)} entries, expected {k}")
            if all(row):
                raise ProfileError(f"row {j} meets every conjugacy class")
            if self.identity_column is not None and not row[self.identity_column]:
                raise ProfileError(f"row {j} misses the identity class")
        if len(self.matrix) > MAX_ROWS:
            raise ProfileError(f"{len(self.matrix)} maximal classes exceeds the limit of {MAX_ROWS}")
        if self.labels is not None and len(self.labels) != len(self.matrix):
            raise ProfileError("one label per row required")
        if self.order > 1 and not self.matrix:
            raise ProfileError("a nontrivial group has at least one maximal class")

    @classmethod
    def from_densities(cls, densities: Sequence, matrix, **kw) -> "GenerationProfile":
        dens = [Fraction(d) for d in densities]
        if sum(dens) != 1:
            raise ProfileError("densities must sum to 1")
        den = lcm(*(d.denominator for d in dens))
        return cls(den, tuple(int(d * den) for d in dens), matrix, **kw)

    @property
    def rows(self) -> int:
        return len(self.matrix)

    @property
    def class_densities(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(s, self.order) for s in self.class_sizes)

    def row_bits(self) -> list[int]:
        return [sum(1 << i for i, b in enumerate(r) if b) for r in self.matrix]

    def weight(self, bits: int) -> int:
        w, i = 0, 0
        while bits:
            if bits & 1:
                w += self.class_sizes[i]
            bits >>= 1
            i += 1
        return w

    # -------------------------------------------------------------- JSON
    def to_dict(self) -> dict:
        out = {"order": self.order, "class_sizes": list(self.class_sizes), "maximal_classes": []}
        for j, row in enumerate(self.matrix):
            entry = {"label": self.labels[j] if self.labels else f"M{j}"}
            if self.orbit_sizes is not None:
                entry["orbit_size"] = self.orbit_sizes[j]
            entry["contains"] = list(row)
            out["maximal_classes"].append(entry)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "GenerationProfile":
        try:
            order = int(d["order"])
            sizes = [int(s) for s in d["class_sizes"]]
            mcs = d.get("maximal_classes", [])
            matrix = [[bool(b) for b in m["contains"]] for m in mcs]
            labels = tuple(str(m.get("label", f"M{j}")) for j, m in enumerate(mcs))
            orbits = None
            if mcs and all("orbit_size" in m for m in mcs):
                orbits = tuple(int(m["orbit_size"]) for m in mcs)
        except (KeyError, TypeError, ValueError) as exc:
            raise ProfileError(f"malformed profile: {exc}") from None
        ident = d.get("identity_column")
        return cls(order, tuple(sizes), tuple(map(tuple, matrix)), labels, orbits,
                   None if ident is None else int(ident))

    @classmethod
    def from_json(cls, text: str) -> "GenerationProfile":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ProfileError(f"invalid JSON: {exc}") from None


def _check_rows(profile: GenerationProfile, rows: Iterable[int] | None) -> tuple[int, ...]:
    if rows is None:
        rows = range(profile.rows)
    rows = tuple(sorted(set(int(r) for r in rows)))
    if any(r < 0 or r >= profile.rows for r in rows):
        raise ProfileError(f"row index out of range 0..{profile.rows - 1}")
    if len(rows) > MAX_ROWS:
        raise ProfileError(f"{len(rows)} rows exceeds the limit of {MAX_ROWS}")
    return rows


def signed_counts(profile: GenerationProfile, rows: Iterable[int] | None = None) -> dict[int, int]:
    """Map w -> sum of (-1)^(|I|+1) over nonempty I with weight(∩ rows of I) = w.

    A branch whose conjunction is already contained in every remaining row
    contributes zero in total (its extensions cancel), so it is pruned.
    """
    rows = _check_rows(profile, rows)
    cached = profile._cache.get(("counts", rows))
    if cached is not None:
        return cached
    all_bits = profile.row_bits()
    bits = [all_bits[r] for r in rows]
    m = len(bits)
    full = (1 << len(profile.class_sizes)) - 1
    suffix = [full] * (m + 1)
    for j in range(m - 1, -1, -1):
        suffix[j] = suffix[j + 1] & bits[j]
    raw: dict[int, int] = defaultdict(int)

    def visit(cur: int, start: int, sign: int):
        if start < m and cur & ~suffix[start] == 0:
            return
        raw[cur] += sign
        for j in range(start, m):
            visit(cur & bits[j], j + 1, -sign)

    for j in range(m):
        visit(bits[j], j + 1, 1)
    counts: dict[int, int] = defaultdict(int)
    for b, c in raw.items():
        if c:
            counts[profile.weight(b)] += c
    result = {w: c for w, c in sorted(counts.items()) if c}
    profile._cache[("counts", rows)] = result
    return result


def nu_intersection(profile: GenerationProfile, I: Iterable[int]) -> Fraction:
    I = _check_rows(profile, I)
    if not I:
        raise ProfileError("I must be nonempty")
    bits = -1
    rb = profile.row_bits()
    for r in I:
        bits &= rb[r]
    return Fraction(profile.weight(bits), profile.order)


def _moments(profile: GenerationProfile, rows=None) -> tuple[Fraction, Fraction]:
    N = profile.order
    c = Fraction(0)
    c2 = Fraction(0)
    for w, k in signed_counts(profile, rows).items():
        # nu = w/N: 1/(1-nu) and (1+nu)/(1-nu)^2
        c += k * Fraction(N, N - w)
        c2 += k * Fraction(N * (N + w), (N - w) ** 2)
    return c, c2


def chebotarev(profile: GenerationProfile) -> Fraction:
    if profile.rows == 0:
        return Fraction(1)
    return _moments(profile)[0]


def secondary(profile: GenerationProfile) -> Fraction:
    if profile.rows == 0:
        return Fraction(1)
    return _moments(profile)[1]


def non_generation_probability(profile: GenerationProfile, n: int) -> Fraction:
    """P(tau > n): n independent uniform classes fail to invariably generate."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return Fraction(1)
    if profile.rows == 0:
        return Fraction(0)
    N = profile.order
    return sum((k * Fraction(w, N) ** n for w, k in signed_counts(profile).items()), Fraction(0))


def distribution(profile: GenerationProfile, n_max: int) -> list[Fraction]:
    """[P(tau = 1), ..., P(tau = n_max)]."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    tails = [non_generation_probability(profile, n) for n in range(n_max + 1)]
    return [tails[n - 1] - tails[n] for n in range(1, n_max + 1)]


def tail_ratio(profile: GenerationProfile) -> Fraction:
    """Largest single-row density; P(tau > n) <= rows * ratio^n."""
    return max((nu_intersection(profile, [r]) for r in range(profile.rows)), default=Fraction(0))


def complement_density(profile: GenerationProfile, M: Iterable[int]) -> Fraction:
    """1 - nu(union of the rows not in M)."""
    M = set(_check_rows(profile, M))
    bits = 0
    for r, b in enumerate(profile.row_bits()):
        if r not in M:
            bits |= b
    return 1 - Fraction(profile.weight(bits), profile.order)


@dataclass(frozen=True)
class PartialBounds:
    e1: Fraction
    e2: Fraction
    c_bounds: tuple[Fraction, Fraction]
    c2_bounds: tuple[Fraction, Fraction]


def partial_bounds(profile: GenerationProfile, M: Iterable[int], p_M=None) -> PartialBounds:
    """Moments of the waiting time restricted to rows M, and the resulting
    brackets for c and c2.  ``p_M`` defaults to :func:`complement_density`."""
    M = _check_rows(profile, M)
    if not M:
        raise ProfileError("M must be nonempty")
    p_M = complement_density(profile, M) if p_M is None else Fraction(p_M)
    if p_M <= 0 or p_M > 1:
        raise ProfileError("p_M must lie in (0, 1]")
    e1, e2 = _moments(profile, M)
    return PartialBounds(e1, e2, (e1, e1 - 1 + 1 / p_M), (e2, e2 + (2 - p_M) / p_M ** 2 - 1))


def result_dict(profile: GenerationProfile) -> dict:
    c, c2 = chebotarev(profile), secondary(profile)
    return {
        "chebotarev": fraction_json(c),
        "decimal": format_fixed(c, 6),
        "secondary": fraction_json(c2),
        "secondary_decimal": format_fixed(c2, 6),
        "table_precision": {"chebotarev": format_sig(c, 7), "secondary": format_sig(c2, 7)},
    }
