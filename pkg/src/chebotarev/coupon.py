"""Waiting times for collecting a family of subsets.

Draws are i.i.d. points of a finite set D with law mu.  For a family E of
subsets, tau is the first time every member of E has been hit.  Formulas are
inclusion-exclusion over the unions E_I; a Markov chain on "which members are
already hit" gives an independent exact oracle.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .numfmt import fraction_json, parse_fraction

MAX_SETS = 30
MAX_DP_SETS = 16


class CouponError(ValueError):
    pass


@dataclass(frozen=True)
class CouponInstance:
    weights: tuple[Fraction, ...]
    sets: tuple[frozenset, ...]

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "sets", tuple(frozenset(int(i) for i in s) for s in self.sets))
        if not w or any(x < 0 for x in w) or sum(w) != 1:
            raise CouponError("weights must be nonnegative and sum to 1")
        if not self.sets:
            raise CouponError("the family of sets must be nonempty")
        for s in self.sets:
            if not s:
                raise CouponError("sets must be nonempty")
            if min(s) < 0 or max(s) >= len(w):
                raise CouponError(f"set {sorted(s)} leaves the ground set 0..{len(w) - 1}")
            if self.measure(s) == 0:
                raise CouponError(
                    f"set {sorted(s)} has measure zero: the waiting time is almost surely infinite")

    def measure(self, s: Iterable[int]) -> Fraction:
        return sum((self.weights[i] for i in set(s)), Fraction(0))

    @classmethod
    def from_dict(cls, d: dict) -> "CouponInstance":
        try:
            weights = [parse_fraction(x) for x in d["weights"]]
            sets = [list(s) for s in d["sets"]]
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise CouponError(f"malformed coupon instance: {exc}") from None
        return cls(tuple(weights), tuple(sets))

    @classmethod
    def from_json(cls, text: str) -> "CouponInstance":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise CouponError(f"invalid JSON: {exc}") from None

    def to_dict(self) -> dict:
        return {"weights": [[str(w.numerator), str(w.denominator)] for w in self.weights],
                "sets": [sorted(s) for s in self.sets]}


def _as_instance(mu, sets=None) -> CouponInstance:
    if isinstance(mu, CouponInstance):
        return mu
    return CouponInstance(tuple(mu), tuple(sets))


def _mask(s: Iterable[int]) -> int:
    out = 0
    for i in s:
        out |= 1 << int(i)
    return out


def union_counts(inst: CouponInstance) -> dict[Fraction, int]:
    """Map mu(E_I) -> sum of (-1)^(|I|+1) over nonempty I with that union measure."""
    if len(inst.sets) > MAX_SETS:
        raise CouponError(f"{len(inst.sets)} sets exceeds the limit of {MAX_SETS}")
    bits = [_mask(s) for s in inst.sets]
    m = len(bits)
    # a branch whose union already covers every remaining set cancels out
    suffix = [0] * (m + 1)
    for j in range(m - 1, -1, -1):
        suffix[j] = suffix[j + 1] | bits[j]
    raw: dict[int, int] = defaultdict(int)

    def visit(cur: int, start: int, sign: int):
        if start < m and suffix[start] & ~cur == 0:
            return
        raw[cur] += sign
        for j in range(start, m):
            visit(cur | bits[j], j + 1, -sign)

    for j in range(m):
        visit(bits[j], j + 1, 1)
    out: dict[Fraction, int] = defaultdict(int)
    for b, c in raw.items():
        if c:
            out[inst.measure(i for i in range(b.bit_length()) if b >> i & 1)] += c
    return {k: v for k, v in out.items() if v}


def expected_time(mu, sets=None) -> Fraction:
    inst = _as_instance(mu, sets)
    return sum((c / u for u, c in union_counts(inst).items()), Fraction(0))


def second_moment(mu, sets=None) -> Fraction:
    inst = _as_instance(mu, sets)
    return sum((c * (2 - u) / (u * u) for u, c in union_counts(inst).items()), Fraction(0))


def _pair_measures(weights, E_I, E_J):
    w = [Fraction(x) for x in weights]
    A, B = set(E_I), set(E_J)
    meas = lambda s: sum((w[i] for i in s), Fraction(0))  # noqa: E731
    return meas(A), meas(B), meas(A & B), meas(A | B), meas(A - B), meas(B - A)


def pair_expectation(weights, E_I, E_J) -> Fraction:
    """E(T_I T_J) for the hitting times of two subsets."""
    p, q, _, s, _, _ = _pair_measures(weights, E_I, E_J)
    if p == 0 or q == 0:
        raise CouponError("both sets need positive measure")
    return (1 / s) * (1 / p + 1 / q - 1)


def joint_pmf(weights, E_I, E_J, n: int, m: int) -> Fraction:
    """P(T_I = n, T_J = m)."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be at least 1")
    p, q, r, s, p1, q1 = _pair_measures(weights, E_I, E_J)
    if n == m:
        return (1 - s) ** (n - 1) * r
    if n > m:
        return (1 - s) ** (m - 1) * q1 * (1 - p) ** (n - m - 1) * p
    return (1 - s) ** (n - 1) * p1 * (1 - q) ** (m - n - 1) * q


def pair_tail_bound(weights, E_I, E_J, N: int) -> Fraction:
    """Upper bound on sum of n m P(T_I=n, T_J=m) over max(n, m) > N."""
    p, q, *_ = _pair_measures(weights, E_I, E_J)
    return _square_tail(1 - p, N) + _square_tail(1 - q, N)


def _square_tail(x: Fraction, N: int) -> Fraction:
    """sum_{k>N} k^2 x^(k-1)."""
    if x == 0:
        return Fraction(0)
    full = (1 + x) / (1 - x) ** 3
    return full - sum((k * k * x ** (k - 1) for k in range(1, N + 1)), Fraction(0))


# ------------------------------------------------------------ Markov chain

def _transitions(inst: CouponInstance) -> dict[int, Fraction]:
    """Probability of each 'which sets does this draw hit' pattern."""
    pattern: dict[int, Fraction] = defaultdict(Fraction)
    for x, w in enumerate(inst.weights):
        if w:
            pattern[sum(1 << j for j, s in enumerate(inst.sets) if x in s)] += w
    return dict(pattern)


def _check_dp(inst: CouponInstance):
    if len(inst.sets) > MAX_DP_SETS:
        raise CouponError(f"state space cap exceeded: {len(inst.sets)} sets (limit {MAX_DP_SETS})")


def exact_distribution_dp(mu, sets=None, n_max: int = 30) -> list[Fraction]:
    """[P(tau = 1), ..., P(tau = n_max)] by forward propagation over states."""
    inst = _as_instance(mu, sets)
    _check_dp(inst)
    full = (1 << len(inst.sets)) - 1
    trans = _transitions(inst)
    state = {0: Fraction(1)}
    out = []
    for _ in range(n_max):
        nxt: dict[int, Fraction] = defaultdict(Fraction)
        for S, pr in state.items():
            for hit, w in trans.items():
                nxt[S | hit] += pr * w
        out.append(nxt.pop(full, Fraction(0)))
        state = nxt
    return out


def dp_moments(mu, sets=None) -> tuple[Fraction, Fraction]:
    """Exact E(tau) and E(tau^2) by first-step analysis on the same chain."""
    inst = _as_instance(mu, sets)
    _check_dp(inst)
    k = len(inst.sets)
    full = (1 << k) - 1
    trans = _transitions(inst)
    m1 = {full: Fraction(0)}
    m2 = {full: Fraction(0)}
    # states only grow, so solve from the full state downwards
    for S in sorted(range(full), key=lambda s: -bin(s).count("1")):
        stay = sum((w for hit, w in trans.items() if S | hit == S), Fraction(0))
        moves = [(S | hit, w) for hit, w in trans.items() if S | hit != S]
        if not moves:
            continue
        a = sum((w * m1[T] for T, w in moves), Fraction(0))
        b = sum((w * m2[T] for T, w in moves), Fraction(0))
        # T_S = 1 + T_next:  E = 1 + stay E + a,  E2 = 1 + 2(stay E + a) + stay E2 + b
        e = (1 + a) / (1 - stay)
        m1[S] = e
        m2[S] = (1 + 2 * (stay * e + a) + b) / (1 - stay)
    return m1[0], m2[0]


def moment_tail_bounds(mu, sets=None, N: int = 30) -> tuple[Fraction, Fraction]:
    """Bounds on E(tau 1{tau>N}) and E(tau^2 1{tau>N}) from P(tau>n) <= k rho^n."""
    inst = _as_instance(mu, sets)
    k = len(inst.sets)
    rho = max(1 - inst.measure(s) for s in inst.sets)
    if rho == 0:
        return Fraction(0), Fraction(0)
    first = k * (N * rho ** N + rho ** N / (1 - rho))
    second = k * _square_tail(rho, N)
    return first, second


def integral_expected_time(mu, sets=None) -> Fraction:
    """E(tau) = int_0^inf 1 - prod_E (1 - exp(-mu(E) t)) dt for pairwise disjoint sets,
    evaluated by expanding the product into exponentials."""
    inst = _as_instance(mu, sets)
    seen: set[int] = set()
    for s in inst.sets:
        if seen & s:
            raise CouponError("the integral formula needs pairwise disjoint sets")
        seen |= s
    poly: dict[Fraction, Fraction] = {Fraction(0): Fraction(1)}  # rate -> coefficient
    for s in inst.sets:
        a = inst.measure(s)
        nxt: dict[Fraction, Fraction] = defaultdict(Fraction)
        for rate, c in poly.items():
            nxt[rate] += c
            nxt[rate + a] -= c
        poly = nxt
    # 1 - poly: the constant term cancels; int exp(-c t) dt = 1/c
    return sum((-c / rate for rate, c in poly.items() if rate != 0), Fraction(0))


def profile_instance(profile) -> CouponInstance:
    """The coupon family equivalent to a generation profile: complements of rows."""
    k = len(profile.class_sizes)
    sets = [[i for i in range(k) if not row[i]] for row in profile.matrix]
    return CouponInstance(profile.class_densities, tuple(sets))


def result_dict(inst: CouponInstance) -> dict:
    from .numfmt import format_fixed
    e, e2 = expected_time(inst), second_moment(inst)
    return {"expected_time": fraction_json(e), "decimal": format_fixed(e, 6),
            "second_moment": fraction_json(e2), "second_moment_decimal": format_fixed(e2, 6)}
