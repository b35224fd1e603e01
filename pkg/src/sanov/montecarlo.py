"""Monte Carlo estimate of ``P(empirical measure in A)`` with a Wilson interval.

Samples come from numpy's Philox counter-based generator.  Trials are split
into ``partitions`` independent streams spawned from the seed; hit counts add
up, so results are reproducible for a fixed ``(seed, trials, partitions)``.
Drawing the type of an i.i.d. ``n``-sample directly from the multinomial law
is equivalent to drawing the sample and counting symbols.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .constraints import ConstraintSet
from .errors import DimensionError, ValidationError
from .measures import Dist

GENERATOR = "numpy.random.Philox (SeedSequence.spawn per partition)"
BATCH = 1 << 16
CONFIDENCE = 0.95


@dataclass(frozen=True)
class McEstimate:
    trials: int
    hits: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: int
    one_sided: bool = False
    partitions: int = 1
    generator: str = GENERATOR

    def covers(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high


def wilson_interval(hits: int, trials: int, confidence: float = CONFIDENCE) -> tuple[float, float, bool]:
    """Wilson score interval ``(low, high, one_sided)`` for a binomial proportion.

    With zero hits (or zero misses) the interval is one-sided: the bound at
    the observed extreme is exact and the other uses the one-sided quantile.
    """
    if trials < 1 or not 0 <= hits <= trials:
        raise ValidationError(f"need 0 <= hits <= trials and trials >= 1, got {hits}/{trials}")
    one_sided = hits in (0, trials)
    tail = 1 - confidence if one_sided else (1 - confidence) / 2
    z = NormalDist().inv_cdf(1 - tail)
    phat = hits / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    low, high = max(0.0, centre - half), min(1.0, centre + half)
    if hits == 0:
        low = 0.0
    if hits == trials:
        high = 1.0
    return low, high, one_sided


def _count_hits(rng: np.random.Generator, p: Dist, n: int, a: ConstraintSet, trials: int) -> int:
    hits = 0
    for start in range(0, trials, BATCH):
        size = min(BATCH, trials - start)
        counts = rng.multinomial(n, p.probs, size=size)
        hits += int(a.contains_counts(counts, n).sum())
    return hits


def estimate(p: Dist, n: int, a: ConstraintSet, trials: int, seed: int,
             partitions: int = 1) -> McEstimate:
    """Fraction of ``trials`` simulated ``n``-samples whose type lies in ``a``."""
    if p.k != a.k:
        raise DimensionError(f"distribution over {p.k} symbols, constraints over {a.k}")
    if trials < 1:
        raise ValidationError(f"trials must be positive, got {trials}")
    if n < 1:
        raise ValidationError(f"sample size must be positive, got {n}")
    if not 0 <= seed < 2**64:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if partitions < 1:
        raise ValidationError(f"partitions must be positive, got {partitions}")
    streams = np.random.SeedSequence(seed).spawn(partitions)
    shares = [trials // partitions + (i < trials % partitions) for i in range(partitions)]
    hits = sum(
        _count_hits(np.random.Generator(np.random.Philox(s)), p, n, a, share)
        for s, share in zip(streams, shares)
    )
    low, high, one_sided = wilson_interval(hits, trials)
    return McEstimate(
        trials=trials,
        hits=hits,
        p_hat=hits / trials,
        ci_low=low,
        ci_high=high,
        seed=seed,
        one_sided=one_sided,
        partitions=partitions,
    )
