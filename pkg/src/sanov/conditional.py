"""The law of an i.i.d. sample conditioned on its type landing in a set.

Conditioning ``P^n`` on ``{empirical measure in A}`` gives an exchangeable
law ``mu`` that is uniform inside each type class, so every functional needed
here is a sum over member types weighted by ``Pr(type | A)``.  ``mu`` is never
materialized over the ``k**n`` sequences.

Aggregation makes two passes over the type stream: the first accumulates
``ln P(A)`` with a streaming log-sum-exp, the second the weighted sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.special import logsumexp, xlogy

from .constraints import ConstraintSet
from .errors import DimensionError, EmptyEventError
from .measures import Dist, InfoValue, Residual, entropy, relative_entropy
from .typespace import log_multinomial, log_type_probs, type_blocks


@dataclass(frozen=True)
class ConditionalSummary:
    n: int
    log_prob_event: float
    omega: Dist
    total_correlation: InfoValue
    entropy_mu: InfoValue
    kl_omega_p: InfoValue

    @property
    def prob_event(self) -> float:
        return math.exp(self.log_prob_event)

    @property
    def log10_prob_event(self) -> float:
        return self.log_prob_event / math.log(10)

    def identity_residual(self) -> Residual:
        """``|-ln P(A) - n D(omega||P) - TC|`` with the scale of ``ln P(A)``."""
        lhs = -self.log_prob_event
        rhs = self.n * float(self.kl_omega_p) + float(self.total_correlation)
        return Residual(abs(lhs - rhs), scale=abs(lhs))


def _member_blocks(p: Dist, n: int, a: ConstraintSet,
                   budget: int | None) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(counts, log_type_prob)`` for member types of positive probability."""
    if p.k != a.k:
        raise DimensionError(f"distribution over {p.k} symbols, constraints over {a.k}")
    for block in type_blocks(p.k, n, budget):
        members = block[a.contains_counts(block, n)]
        if not len(members):
            continue
        lp = log_type_probs(members, p)
        keep = np.isfinite(lp)
        if keep.any():
            yield members[keep], lp[keep]


def log_event_prob(p: Dist, n: int, a: ConstraintSet, budget: int | None = None) -> float:
    """``ln P(empirical measure in A)``; ``-inf`` for an empty event."""
    acc = -math.inf
    for _, lp in _member_blocks(p, n, a, budget):
        acc = float(np.logaddexp(acc, logsumexp(lp)))
    return acc


def _require_event(log_prob, n):
    if log_prob == -math.inf:
        raise EmptyEventError(f"empty event: no positive-probability n={n} sample has its type "
                              "in the constraint set")


def summarize(p: Dist, n: int, a: ConstraintSet, budget: int | None = None) -> ConditionalSummary:
    """Every quantity attached to the conditional law, from per-type data only.

    Raises
    ------
    EmptyEventError
        If no type with positive probability satisfies the constraints.
    CapacityError
        If the number of types exceeds the enumeration budget.
    """
    log_prob = log_event_prob(p, n, a, budget)
    _require_event(log_prob, n)

    omega_parts, h_parts = [], []
    for counts, lp in _member_blocks(p, n, a, budget):
        lw = lp - log_prob
        w = np.exp(lw)
        omega_parts.append(w @ counts / n)
        # mu is uniform on each type class: -sum_t w_t ln(w_t / #class_t)
        h_parts.append(-np.sum(w * (lw - log_multinomial(counts))))
    omega_raw = np.array([math.fsum(col) for col in np.array(omega_parts).T])
    omega = Dist.normalized(omega_raw)
    entropy_mu = math.fsum(h_parts)

    tc = n * float(entropy(omega)) - entropy_mu
    if -1e-12 * max(1.0, entropy_mu) < tc < 0.0:
        tc = 0.0  # roundoff on events that are exact products
    return ConditionalSummary(
        n=n,
        log_prob_event=log_prob,
        omega=omega,
        total_correlation=InfoValue(tc),
        entropy_mu=InfoValue(entropy_mu),
        kl_omega_p=relative_entropy(omega, p),
    )


def kl_to_product(p: Dist, n: int, a: ConstraintSet, q: Dist,
                  budget: int | None = None, log_prob: float | None = None) -> InfoValue:
    """``D(mu || q^n)`` by direct aggregation over member types."""
    if q.k != p.k:
        raise DimensionError(f"reference over {q.k} symbols, distribution over {p.k}")
    if log_prob is None:
        log_prob = log_event_prob(p, n, a, budget)
    _require_event(log_prob, n)
    parts = []
    for counts, lp in _member_blocks(p, n, a, budget):
        with np.errstate(divide="ignore"):
            log_q_seq = xlogy(counts, q.probs).sum(axis=1)
        if np.any(np.isneginf(log_q_seq)):
            return InfoValue.infinity()
        lw = lp - log_prob
        w = np.exp(lw)
        # per sequence: ln mu(y) = lw - ln #class, ln q^n(y) = sum_u c_u ln q_u
        parts.append(np.sum(w * (lw - log_multinomial(counts) - log_q_seq)))
    return InfoValue(math.fsum(parts))


def core_identity_check(p: Dist, n: int, a: ConstraintSet, q: Dist,
                        budget: int | None = None,
                        summary: ConditionalSummary | None = None) -> Residual:
    """Residual of ``D(mu||q^n) - D(mu||omega^n) = n D(omega||q)``.

    Both divergences of ``mu`` are aggregated type by type; the right side
    uses the marginal.  If ``q`` misses the support of ``omega`` both sides
    are infinite and a matched-infinity residual is returned.
    """
    if summary is None:
        summary = summarize(p, n, a, budget)
    rhs = relative_entropy(summary.omega, q)
    lhs_q = kl_to_product(p, n, a, q, budget, summary.log_prob_event)
    if rhs.infinite or lhs_q.infinite:
        if rhs.infinite and lhs_q.infinite:
            return Residual(0.0, matched_infinity=True)
        return Residual(math.inf)
    tc_direct = kl_to_product(p, n, a, summary.omega, budget, summary.log_prob_event)
    lhs = float(lhs_q) - float(tc_direct)
    rhs_v = n * float(rhs)
    return Residual(abs(lhs - rhs_v), scale=max(abs(float(lhs_q)), abs(rhs_v)))
