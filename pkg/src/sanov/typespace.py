"""Type classes of n-samples and their probabilities.

A type is the vector of symbol counts of a sample.  Types are enumerated as
compositions of ``n`` into ``k`` parts in lexicographic order, either one at
a time (:func:`enumerate_types`) or as integer blocks (:func:`type_blocks`)
for vectorized aggregation.

The full-sequence oracles at the bottom of the module enumerate all ``k**n``
sequences and never touch multinomial coefficients.  They exist to check the
type-level computations on small instances.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

from .errors import CapacityError, DimensionError, ValidationError
from .measures import Dist

DEFAULT_BUDGET = 20_000_000
BUDGET_ENV = "SANOV_BUDGET"
SEQUENCE_CAP = 10**7
SEQUENCE_CHUNK = 1 << 18
BLOCK_SIZE = 65_536


def default_budget() -> int:
    """Enumeration budget: ``$SANOV_BUDGET`` if set, else ``DEFAULT_BUDGET``."""
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValidationError(f"{BUDGET_ENV} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class TypeVector:
    """Symbol counts of an ``n``-sample."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) < 2:
            raise ValidationError("a type needs at least two symbols")
        if any(c < 0 for c in counts):
            raise ValidationError(f"negative count in {counts}")
        if sum(counts) < 1:
            raise ValidationError("sample size must be positive")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def k(self) -> int:
        return len(self.counts)

    def as_dist(self) -> Dist:
        n = self.n
        return Dist([c / n for c in self.counts])


def type_count(k: int, n: int) -> int:
    """Number of types of ``n``-samples over ``k`` symbols."""
    return math.comb(n + k - 1, k - 1)


def check_budget(k: int, n: int, budget: int | None = None) -> int:
    if k < 2:
        raise ValidationError(f"alphabet size must be at least 2, got {k}")
    if n < 1:
        raise ValidationError(f"sample size must be positive, got {n}")
    budget = default_budget() if budget is None else budget
    required = type_count(k, n)
    if required > budget:
        raise CapacityError(
            f"enumerating types for k={k}, n={n} needs {required} types, budget is {budget}",
            required=required,
            budget=budget,
        )
    return required


def type_blocks(k: int, n: int, budget: int | None = None,
                block_size: int = BLOCK_SIZE) -> Iterator[np.ndarray]:
    """Yield all types as ``(m, k)`` integer arrays, lexicographic across blocks.

    Stars and bars: the bar positions of ``combinations(range(n+k-1), k-1)``
    come out in lexicographic order, and so do the count vectors they encode.
    """
    check_budget(k, n, budget)
    bars = itertools.combinations(range(n + k - 1), k - 1)
    while True:
        chunk = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(bars, block_size)),
            dtype=np.int64,
        )
        if chunk.size == 0:
            return
        pos = chunk.reshape(-1, k - 1)
        m = pos.shape[0]
        edges = np.hstack([np.full((m, 1), -1), pos, np.full((m, 1), n + k - 1)])
        yield np.diff(edges, axis=1) - 1


def enumerate_types(k: int, n: int, budget: int | None = None) -> Iterator[TypeVector]:
    """Yield every type of an ``n``-sample over ``k`` symbols exactly once, in lexicographic order.

    Raises
    ------
    CapacityError
        If ``C(n+k-1, k-1)`` exceeds the budget.
    """
    for block in type_blocks(k, n, budget):
        for row in block.tolist():
            yield TypeVector(tuple(row))


def log_multinomial(counts: np.ndarray) -> np.ndarray:
    """``ln(n! / prod c_u!)`` row-wise, via ln-gamma."""
    counts = np.asarray(counts)
    n = counts.sum(axis=-1)
    return gammaln(n + 1) - gammaln(counts + 1).sum(axis=-1)


def log_type_probs(counts: np.ndarray, p: Dist) -> np.ndarray:
    """Vectorized :func:`log_type_prob` over the rows of ``counts``."""
    counts = np.asarray(counts)
    if counts.shape[-1] != p.k:
        raise DimensionError(f"type has {counts.shape[-1]} symbols, distribution has {p.k}")
    with np.errstate(divide="ignore"):
        return log_multinomial(counts) + xlogy(counts, p.probs).sum(axis=-1)


def log_type_prob(t: TypeVector, p: Dist) -> float:
    """Log-probability that an i.i.d. ``p``-sample of size ``t.n`` has type ``t``.

    Returns ``-inf`` when ``t`` uses a symbol that ``p`` gives zero mass.
    """
    return float(log_type_probs(np.array(t.counts), p))


def simplex_grid(k: int, steps: int) -> list[Dist]:
    """All distributions with coordinates in ``{0, 1/steps, ..., 1}``."""
    return [t.as_dist() for t in enumerate_types(k, steps)]


# Full-sequence oracles.

def _check_sequences(k: int, n: int) -> int:
    total = k**n
    if total > SEQUENCE_CAP:
        raise CapacityError(
            f"brute force over k**n = {k}**{n} = {total} sequences exceeds {SEQUENCE_CAP}",
            required=total,
            budget=SEQUENCE_CAP,
        )
    return total


def _symbols_for(k: int, n: int, start: int, stop: int):
    codes = np.arange(start, stop, dtype=np.int64)
    powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    symbols = (codes[:, None] // powers) % k
    counts = np.stack([(symbols == u).sum(axis=1) for u in range(k)], axis=1)
    if (n + 1) ** k < 2**62:
        # one integer code per count vector: unique on a flat array is far cheaper than on rows
        radix = (n + 1) ** np.arange(k, dtype=np.int64)
        _, first, inverse = np.unique(counts @ radix, return_index=True, return_inverse=True)
        return symbols, counts[first], inverse.reshape(-1)
    distinct, inverse = np.unique(counts, axis=0, return_inverse=True)
    return symbols, distinct, inverse.reshape(-1)


@lru_cache(maxsize=64)
def _small_table(k: int, n: int):
    table = _symbols_for(k, n, 0, k**n)
    for arr in table:
        arr.setflags(write=False)
    return table


def _sequence_chunks(k: int, n: int):
    """Yield ``(symbols, distinct_counts, inverse)`` over all sequences in chunks."""
    total = _check_sequences(k, n)
    if total <= SEQUENCE_CHUNK:
        yield _small_table(k, n)
        return
    for start in range(0, total, SEQUENCE_CHUNK):
        yield _symbols_for(k, n, start, min(total, start + SEQUENCE_CHUNK))


def _member_chunks(k, n, p, member):
    """Yield ``(symbols, member_mask, sequence_logprob)`` chunk by chunk."""
    if p.k != k:
        raise DimensionError(f"alphabet size {k} does not match distribution of size {p.k}")
    with np.errstate(divide="ignore"):
        logp = np.log(p.probs)
    memo = {}
    for symbols, distinct, inverse in _sequence_chunks(k, n):
        keep = np.empty(len(distinct), dtype=bool)
        for i, row in enumerate(distinct.tolist()):
            key = tuple(row)
            if key not in memo:
                memo[key] = bool(member(TypeVector(key)))
            keep[i] = memo[key]
        yield symbols, keep[inverse], logp[symbols].sum(axis=1)


def brute_force_event_prob(k: int, n: int, p: Dist,
                           member: Callable[[TypeVector], bool]) -> float:
    """``P^n`` of the sequences whose type satisfies ``member``, by summing over all ``k**n`` sequences."""
    parts = [np.exp(seq_logp[mask]) for _, mask, seq_logp in _member_chunks(k, n, p, member)]
    return math.fsum(np.concatenate(parts))


@dataclass(frozen=True)
class SequenceOracle:
    """Conditional-law quantities computed directly on ``X^n``.

    ``mu`` is the conditional law of the sample given the event and
    ``omega`` its first-coordinate marginal.
    """

    n: int
    log_prob_event: float
    omega: np.ndarray
    entropy_mu: float
    total_correlation: float
    symbols: np.ndarray
    mu: np.ndarray

    def kl_to_product(self, q: Dist) -> float:
        """``D(mu || q^n)`` summed sequence by sequence."""
        with np.errstate(divide="ignore"):
            logq = np.log(q.probs)
        seq_logq = logq[self.symbols].sum(axis=1)
        w = self.mu > 0
        if np.any(np.isneginf(seq_logq[w])):
            return math.inf
        return math.fsum(self.mu[w] * (np.log(self.mu[w]) - seq_logq[w]))


def brute_force_conditional(p: Dist, n: int,
                            member: Callable[[TypeVector], bool]) -> SequenceOracle:
    """Condition ``P^n`` on the event by explicit sequence enumeration."""
    kept_symbols, kept_logp = [], []
    for symbols, mask, seq_logp in _member_chunks(p.k, n, p, member):
        mask = mask & np.isfinite(seq_logp)
        kept_symbols.append(symbols[mask])
        kept_logp.append(seq_logp[mask])
    symbols = np.concatenate(kept_symbols)
    seq_logp = np.concatenate(kept_logp)
    if seq_logp.size == 0:
        raise ValueError("event has probability zero")
    log_prob = float(logsumexp(seq_logp))
    log_mu = seq_logp - log_prob
    mu = np.exp(log_mu)
    omega = np.array([math.fsum(mu[symbols[:, 0] == u]) for u in range(p.k)])
    entropy_mu = -math.fsum(mu * log_mu)
    with np.errstate(divide="ignore"):
        log_omega = np.log(omega)
    tc = math.fsum(mu * (log_mu - log_omega[symbols].sum(axis=1)))
    return SequenceOracle(n, log_prob, omega, entropy_mu, tc, symbols, mu)
