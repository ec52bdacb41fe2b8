"""Seeded Monte Carlo estimates of the waiting time.

Randomness comes from a counter-based generator: every uniform is a
SplitMix64-style hash of (seed, trial, draw, lane), so a trial's draws do not
depend on batching, ordering or how many other trials run.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .engine import GenerationProfile

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def counter_hash(seed: int, trial, draw, lane=0) -> np.ndarray:
    with np.errstate(over="ignore"):
        h = _mix(np.asarray(np.uint64(seed & _MASK64)))
        h = _mix(h ^ np.asarray(trial, dtype=np.uint64))
        h = _mix(h ^ np.asarray(draw, dtype=np.uint64))
        return _mix(h ^ np.asarray(lane, dtype=np.uint64))


def counter_uniform(seed: int, trial, draw, lane=0) -> np.ndarray:
    """Uniform doubles in [0, 1) with 53 random bits."""
    h = counter_hash(seed, trial, draw, lane)
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class SimConfig:
    trials: int
    seed: int
    L: int = 100
    B: int = 1024

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.L < 0 or self.B < 1:
            raise ValueError("need L >= 0 and B >= 1")


@dataclass(frozen=True)
class Histogram:
    counts: dict[int, int]
    trials: int
    seed: int
    extra: dict = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return sum(k * c for k, c in self.counts.items()) / self.trials

    @property
    def second_moment(self) -> float:
        return sum(k * k * c for k, c in self.counts.items()) / self.trials

    @property
    def stderr(self) -> float:
        n = self.trials
        if n < 2:
            return float("nan")
        var = (self.second_moment - self.mean ** 2) * n / (n - 1)
        return math.sqrt(max(var, 0.0) / n)

    def frequencies(self) -> dict[int, float]:
        return {k: c / self.trials for k, c in sorted(self.counts.items())}

    def summary(self) -> dict:
        out = {"mean": f"{self.mean:.4f}", "stderr": f"{self.stderr:.4f}",
               "second_moment": f"{self.second_moment:.4f}",
               "trials": self.trials, "seed": self.seed}
        out.update(self.extra)
        return out


def _histogram(taus: np.ndarray, cfg: SimConfig, **extra) -> Histogram:
    values, counts = np.unique(taus, return_counts=True)
    return Histogram({int(k): int(c) for k, c in zip(values, counts)}, cfg.trials, cfg.seed, extra)


def empirical_chebotarev(G, profile: GenerationProfile, cfg: SimConfig,
                         batch: int = 1 << 16) -> Histogram:
    """Draw uniform elements until no maximal class contains all drawn classes.

    With ``G`` given, elements are drawn by index and mapped through the class
    table; with ``G=None`` an index into the cumulative class sizes is drawn,
    which has the same law.
    """
    m = profile.rows
    if m == 0:
        return _histogram(np.ones(cfg.trials, dtype=np.int64), cfg)
    keep = np.zeros(len(profile.class_sizes), dtype=np.int64)
    for r, row in enumerate(profile.matrix):
        for c, b in enumerate(row):
            if b:
                keep[c] |= 1 << r
    if G is not None:
        if G.order != profile.order:
            raise ValueError("profile does not belong to this group")
        class_of = np.asarray(G.conjugacy.class_of)
        draw_class = lambda idx: class_of[idx]  # noqa: E731
    else:
        cum = np.cumsum(profile.class_sizes)
        draw_class = lambda idx: np.searchsorted(cum, idx, side="right")  # noqa: E731
    full = (1 << m) - 1
    taus = np.empty(cfg.trials, dtype=np.int64)
    for start in range(0, cfg.trials, batch):
        trial = np.arange(start, min(start + batch, cfg.trials), dtype=np.uint64)
        alive = np.full(trial.size, full, dtype=np.int64)
        active = np.arange(trial.size)
        draw = 0
        while active.size:
            draw += 1
            u = counter_uniform(cfg.seed, trial[active], draw)
            idx = np.minimum((u * profile.order).astype(np.int64), profile.order - 1)
            alive[active] &= keep[draw_class(idx)]
            finished = alive[active] == 0
            taus[start + active[finished]] = draw
            active = active[~finished]
    return _histogram(taus, cfg)


def empirical_distribution_csv(hist: Histogram) -> str:
    if hist.trials < 1:
        raise ValueError("histogram has no trials")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "count", "frequency"])
    for k, c in sorted(hist.counts.items()):
        w.writerow([k, c, f"{c / hist.trials:.6f}"])
    return buf.getvalue()


def total_variation(hist: Histogram, probs) -> float:
    """Half the L1 distance between empirical frequencies and ``probs[k-1] = P(tau=k)``."""
    freq = hist.frequencies()
    K = max(len(probs), max(freq, default=0))
    total = 0.0
    for k in range(1, K + 1):
        p = float(probs[k - 1]) if k <= len(probs) else 0.0
        total += abs(freq.get(k, 0.0) - p)
    return total / 2


# ---------------------------------------------------------------- Poisson model

def _poisson_inverse(u: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Poisson(lam) samples by inverting the CDF, column-wise rates."""
    k = np.zeros(u.shape, dtype=np.int64)
    p = np.exp(-lam) * np.ones(u.shape)
    F = p.copy()
    j = 0
    while True:
        more = u >= F
        if not more.any():
            return k
        j += 1
        k += more
        p = p * lam / j
        F = F + p


def _positive_sums(counts: np.ndarray, B: int) -> int:
    """Bit set of positive sums of sub-multisets (count[i-1] copies of i), capped at B."""
    bits = 1
    cap = (1 << (B + 1)) - 1
    for i in np.flatnonzero(counts):
        length = int(i) + 1
        for _ in range(int(counts[i])):
            bits = (bits | bits << length) & cap
    return bits & ~1


def poisson_model_estimate(cfg: SimConfig, batch: int = 1 << 14) -> Histogram:
    """Limit model for A_n: cycle counts are independent Poisson(1/i), i <= L.

    A trial stops at the first draw after which no positive subsum is common
    to all drawn cycle-count vectors.
    """
    L, B = cfg.L, cfg.B
    taus = np.empty(cfg.trials, dtype=np.int64)
    if L == 0:
        taus[:] = 1
        return _histogram(taus, cfg, L=L, B=B)
    lam = 1.0 / np.arange(1, L + 1)
    lanes = np.arange(L, dtype=np.uint64)
    for start in range(0, cfg.trials, batch):
        trial = np.arange(start, min(start + batch, cfg.trials), dtype=np.uint64)
        common = [None] * trial.size
        active = list(range(trial.size))
        draw = 0
        while active:
            draw += 1
            act = np.asarray(active)
            u = counter_uniform(cfg.seed, trial[act][:, None], draw, lanes[None, :])
            counts = _poisson_inverse(u, lam[None, :])
            still = []
            for row, t in enumerate(active):
                s = _positive_sums(counts[row], B)
                common[t] = s if common[t] is None else common[t] & s
                if common[t] == 0:
                    taus[start + t] = draw
                else:
                    still.append(t)
            active = still
    return _histogram(taus, cfg, L=L, B=B)
