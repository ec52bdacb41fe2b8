"""Closed formulas for abelian and affine groups, plus certified series.

Finite formulas return exact ``Fraction`` values.  Infinite series return a
:class:`CertifiedValue` whose endpoints are rationals bracketing the limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log2, prod
from typing import Mapping, Sequence

from sympy import divisors, factorint, isprime, mobius, perfect_power


@dataclass(frozen=True)
class CertifiedValue:
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower endpoint exceeds upper endpoint")

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def __contains__(self, x) -> bool:
        return self.lower <= Fraction(x) <= self.upper

    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2


@dataclass(frozen=True)
class AbelianShape:
    """p-ranks of a finite abelian group."""

    prime_ranks: Mapping[int, int]

    def __post_init__(self):
        for p, r in self.prime_ranks.items():
            if not isprime(p) or r < 1:
                raise ValueError(f"invalid rank {r} at p={p}")
        object.__setattr__(self, "prime_ranks", dict(sorted(self.prime_ranks.items())))

    @property
    def delta(self) -> int:
        return max(self.prime_ranks.values(), default=0)

    @classmethod
    def from_factors(cls, factors: Sequence[int]) -> "AbelianShape":
        """r_p = number of factors divisible by p (factors need not be canonical)."""
        ranks: dict[int, int] = {}
        for f in factors:
            if f < 1:
                raise ValueError("factors must be positive")
            for p in factorint(f):
                ranks[p] = ranks.get(p, 0) + 1
        return cls(ranks)


def _squarefree_divisors(n: int) -> list[int]:
    primes = list(factorint(n))
    out = [1]
    for p in primes:
        out += [d * p for d in out]
    return sorted(out)


def cheb_cyclic(n: int) -> Fraction:
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return Fraction(1)
    return -sum(mobius(d) * Fraction(d, d - 1) for d in _squarefree_divisors(n) if d > 1)


def sec_cyclic(n: int) -> Fraction:
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return Fraction(1)
    return -sum(mobius(d) * Fraction(d * (d + 1), (d - 1) ** 2)
                for d in _squarefree_divisors(n) if d > 1)


def _check_pk(p: int, k: int):
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if k < 1:
        raise ValueError("k must be at least 1")


def cheb_elementary(p: int, k: int) -> Fraction:
    _check_pk(p, k)
    return k + sum(Fraction(1, p ** j - 1) for j in range(1, k + 1))


def sec_elementary(p: int, k: int) -> Fraction:
    _check_pk(p, k)
    c = cheb_elementary(p, k)
    return c * c + sum(Fraction(p ** j, (p ** j - 1) ** 2) for j in range(1, k + 1))


def gaussian_binomial(k: int, j: int, x: Fraction) -> Fraction:
    """Gaussian binomial coefficient [k choose j] in the variable x."""
    num = prod((1 - x ** (k - i) for i in range(j)), start=Fraction(1))
    den = prod((1 - x ** (i + 1) for i in range(j)), start=Fraction(1))
    return num / den


def cheb_elementary_qbinomial(p: int, k: int) -> Fraction:
    """Same value as :func:`cheb_elementary`, summed over subspace lattices."""
    _check_pk(p, k)
    x = Fraction(1, p)
    total = Fraction(0)
    for j in range(1, k + 1):
        term = gaussian_binomial(k, j, Fraction(p)) * Fraction(p) ** (j * (j - 1) // 2)
        total += (-1) ** (j + 1) * term / (1 - x ** j)
    return total


def sec_elementary_qbinomial(p: int, k: int) -> Fraction:
    _check_pk(p, k)
    x = Fraction(1, p)
    total = Fraction(0)
    for j in range(1, k + 1):
        term = gaussian_binomial(k, j, Fraction(p)) * Fraction(p) ** (j * (j - 1) // 2)
        total += (-1) ** (j + 1) * term * (1 + x ** j) / (1 - x ** j) ** 2
    return total


# ---------------------------------------------------------------- series

def _pomerance_terms(shape: AbelianShape):
    """Yield (j, 1 - prod_p prod_{i<=r_p} (1 - p^-(delta+j-i)))."""
    delta = shape.delta
    j = 1
    while True:
        P = Fraction(1)
        for p, r in shape.prime_ranks.items():
            for i in range(1, r + 1):
                P *= 1 - Fraction(1, p ** (delta + j - i))
        yield j, 1 - P
        j += 1


def _tail_coefficient(shape: AbelianShape) -> list[tuple[Fraction, int]]:
    """Term j is at most sum_{(a, p)} a * p^-j; returns the (a, p) pairs."""
    delta = shape.delta
    return [(Fraction(p ** i, p ** delta), p)
            for p, r in shape.prime_ranks.items() for i in range(1, r + 1)]


def _tail_bound(coeffs, J: int, weighted: bool, delta: int) -> Fraction:
    """Bound on sum_{j>J} w_j * sum a p^-j, with w_j = 1 or 2j + 2 delta - 1."""
    total = Fraction(0)
    for a, p in coeffs:
        x = Fraction(1, p)
        geo = x ** (J + 1) / (1 - x)                       # sum_{j>J} x^j
        if not weighted:
            total += a * geo
        else:
            # sum_{j>J} j x^j = x^(J+1) ((J+1) - J x) / (1-x)^2
            lin = x ** (J + 1) * ((J + 1) - J * x) / (1 - x) ** 2
            total += a * (2 * lin + (2 * delta - 1) * geo)
    return total


def _series(shape: AbelianShape, tol, weighted: bool) -> CertifiedValue:
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    delta = shape.delta
    if not shape.prime_ranks:
        return CertifiedValue(Fraction(1), Fraction(1))
    coeffs = _tail_coefficient(shape)
    s = Fraction(delta * delta if weighted else delta)
    for j, term in _pomerance_terms(shape):
        s += (2 * j + 2 * delta - 1) * term if weighted else term
        bound = _tail_bound(coeffs, j, weighted, delta)
        if bound <= tol:
            return CertifiedValue(s, s + bound)


def cheb_abelian(shape: AbelianShape, tol=Fraction(1, 10 ** 12)) -> CertifiedValue:
    return _series(shape, tol, weighted=False)


def sec_abelian(shape: AbelianShape, tol=Fraction(1, 10 ** 12)) -> CertifiedValue:
    return _series(shape, tol, weighted=True)


# ---------------------------------------------------------------- Niven

def _dyadic_floor(q: Fraction, bits: int) -> Fraction:
    return Fraction((q.numerator << bits) // q.denominator, 1 << bits)


def _dyadic_ceil(q: Fraction, bits: int) -> Fraction:
    return Fraction(-((-q.numerator << bits) // q.denominator), 1 << bits)


def zeta_enclosure(k: int, N: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rational bounds on zeta(k), k >= 2, from the first N terms.

    The partial sum is rounded outward to ``bits`` binary digits per term.
    The tail sum_{n>N} n^-k is bracketed using convexity of x^-k:
    int_N^inf x^-k dx - N^-k / 2  <=  tail  <=  int_{N+1/2}^inf x^-k dx.
    """
    lo = hi = Fraction(0)
    one = 1 << bits
    for n in range(1, N + 1):
        nk = n ** k
        lo += Fraction(one // nk, one)
        hi += Fraction(-(-one // nk), one)
    t_lo = Fraction(1, (k - 1) * N ** (k - 1)) - Fraction(1, 2 * N ** k)
    t_hi = Fraction(2 ** (k - 1), (k - 1) * (2 * N + 1) ** (k - 1))
    return lo + t_lo, hi + t_hi


def niven_limit(tol=Fraction(1, 10 ** 12)) -> CertifiedValue:
    """Enclosure of 2 + sum_{k>=2} (1 - 1/zeta(k)).

    The parameters only grow as ``tol`` shrinks, so the enclosures nest.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    # 1 - 1/zeta(k) <= zeta(k) - 1 <= 2^-k (1 + 2/k) for k >= 2
    K = 2
    while Fraction(1, 2 ** K) * (1 + Fraction(2, K)) > tol / 4:
        K += 1
    # the k = 2 enclosure has width about N^-3
    N = max(8, ceil((4 / float(tol)) ** (1 / 3)))
    bits = max(16, ceil(log2(N / float(tol))) + 8)
    lo = hi = Fraction(2)
    for k in range(2, K + 1):
        Nk = min(N, max(8, ceil((4 * k * k / float(tol)) ** (1 / (k + 1)))))
        z_lo, z_hi = zeta_enclosure(k, Nk, bits)
        lo += _dyadic_floor(1 - 1 / z_lo, bits)
        hi += _dyadic_ceil(1 - 1 / z_hi, bits)
    hi += Fraction(1, 2 ** K) * (1 + Fraction(2, K))
    return CertifiedValue(lo, hi)


# ---------------------------------------------------------------- affine

def _check_prime_power(q: int):
    if q < 2:
        raise ValueError("q must be at least 2")
    if not isprime(q):
        pp = perfect_power(q)
        if not pp or not isprime(pp[0]):
            raise ValueError(f"{q} is not a prime power")


def cheb_affine(q: int) -> Fraction:
    """c of the group of maps x -> ax + b over the field with q elements."""
    _check_prime_power(q)
    s = Fraction(0)
    for d in _squarefree_divisors(q - 1):
        if d == 1:
            continue
        a = 1 - Fraction(1, d)
        s += mobius(d) / (a * (a + Fraction(1, q)))
    return q - s / q


def sec_affine(q: int) -> Fraction:
    _check_prime_power(q)
    s = Fraction(0)
    for d in _squarefree_divisors(q - 1):
        if d == 1:
            continue
        b = 1 - Fraction(1, d) + Fraction(1, q)
        s += mobius(d) * (1 + Fraction(1, d) - Fraction(1, q)) / b ** 2
    return q * (2 * q - 1) + sec_cyclic(q - 1) + s


def divisor_count(n: int) -> int:
    return len(divisors(n))
