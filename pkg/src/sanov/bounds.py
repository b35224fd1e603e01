"""Finite-sample bounds on ``(1/n) ln P(empirical measure in A)`` and their slack.

For a convex ``A`` the exact rate sits inside the chain

    -max_{Q in A} H(Q,P) <= -H(omega,P) <= rate <= -D(omega||P) <= -D(P*||P)

where ``omega`` is the one-coordinate marginal of the conditioned sample and
``P*`` the I-projection.  The gap between the rate and ``-D(omega||P)`` is
exactly ``(1/n)`` times the total correlation of the conditioned sample.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .conditional import ConditionalSummary, summarize
from .constraints import ConstraintSet, is_subset_witness
from .errors import DimensionError, EmptyEventError, PreconditionError
from .iprojection import IProjection, project
from .measures import Dist, InfoValue, cross_entropy, entropy, relative_entropy
from .typespace import simplex_grid, type_count

WITNESS_GRID_SIZE = 5000


@dataclass(frozen=True)
class SubsetBound:
    """Bound for a subset ``B`` of ``A`` using the I-projection onto ``A``.

    ``residual = lhs - rhs`` is nonpositive, and zero when ``A`` is a linear
    family and ``B = A``.
    """

    n: int
    lhs: float
    rhs: float
    residual: float
    kl_mu_b_projection: float
    log_prob_subset: float


@dataclass(frozen=True)
class BoundsReport:
    n: int
    exact_rate: float
    log_prob_event: float
    log10_prob_event: float
    ub_marginal: float
    ub_iproj: float
    lb_cross: float
    lb_maxcross: float
    tc_slack: float
    ratio_diag: float | None
    omega: Dist
    q_star: Dist
    subset_bound: SubsetBound | None = None

    @property
    def chain(self) -> tuple[float, float, float, float, float]:
        return (self.lb_maxcross, self.lb_cross, self.exact_rate, self.ub_marginal, self.ub_iproj)

    @property
    def gap(self) -> float:
        """Distance of the exact rate above the asymptotic rate (negative below it)."""
        return self.exact_rate - self.ub_iproj

    def ordering_violation(self) -> float:
        """Largest amount by which a link of the bound chain is reversed (``<= 0`` if ordered)."""
        c = self.chain
        return max(c[i] - c[i + 1] for i in range(len(c) - 1))

    def identity_residual(self) -> float:
        """``|rate - (ub_marginal - tc_slack)|``."""
        return abs(self.exact_rate - (self.ub_marginal - self.tc_slack))


def _max_cross_entropy(p: Dist, a: ConstraintSet) -> tuple[InfoValue, np.ndarray]:
    verts = a.check_feasible()
    best_value, best_vertex = -math.inf, None
    for v in verts:
        pos = v > 0
        if np.any(p.probs[pos] == 0):
            return InfoValue.infinity(), v
        value = -math.fsum(v[pos] * np.log(p.probs[pos]))
        if value > best_value:
            best_value, best_vertex = value, v
    return InfoValue(best_value), best_vertex


def max_cross_entropy(p: Dist, a: ConstraintSet) -> InfoValue:
    """``max_{Q in A} H(Q, P)``, attained at a vertex of the feasible polytope."""
    if p.k != a.k:
        raise DimensionError(f"distribution over {p.k} symbols, constraints over {a.k}")
    return _max_cross_entropy(p, a)[0]


def report_from_parts(p: Dist, summary: ConditionalSummary, projection: IProjection,
              max_cross: InfoValue) -> BoundsReport:
    n = summary.n
    h_omega = float(entropy(summary.omega))
    h_cross = float(cross_entropy(summary.omega, p))
    return BoundsReport(
        n=n,
        exact_rate=summary.log_prob_event / n,
        log_prob_event=summary.log_prob_event,
        log10_prob_event=summary.log10_prob_event,
        ub_marginal=-float(summary.kl_omega_p),
        ub_iproj=-float(projection.divergence),
        lb_cross=-h_cross,
        lb_maxcross=-float(max_cross),
        tc_slack=float(summary.total_correlation) / n,
        ratio_diag=h_omega / h_cross if h_cross > 0 else None,
        omega=summary.omega,
        q_star=projection.q_star,
    )


def full_report(p: Dist, n: int, a: ConstraintSet, budget: int | None = None,
                subset: ConstraintSet | None = None) -> BoundsReport:
    """Exact rate, every bound of the chain, and the total-correlation slack.

    With ``subset`` given, the report also carries the :func:`subset_report`
    bound for that subset of ``a``.
    """
    summary = summarize(p, n, a, budget)
    projection = project(p, a)
    report = report_from_parts(p, summary, projection, max_cross_entropy(p, a))
    if subset is not None:
        bound = subset_report(p, n, a, subset, budget, projection=projection)
        report = dataclasses.replace(report, subset_bound=bound)
    return report


def witness_samples(b: ConstraintSet) -> list[Dist]:
    """Spot-check points for a subset claim: the vertices of ``b`` plus a simplex grid."""
    k = b.k
    steps = 1
    while type_count(k, steps + 1) <= WITNESS_GRID_SIZE:
        steps += 1
    samples = [Dist.normalized(np.clip(v, 0, None)) for v in b.vertices()]
    return samples + simplex_grid(k, steps)


def subset_report(p: Dist, n: int, a: ConstraintSet, b: ConstraintSet,
                  budget: int | None = None,
                  samples: Iterable[Dist] | None = None,
                  projection: IProjection | None = None) -> SubsetBound:
    """Evaluate ``(1/n) ln P(B) <= -D(P*_A||P) - (1/n) D(mu_B||P*_A^n)``.

    The divergence of ``mu_B`` to the product of the projection is obtained
    from ``B``'s conditional summary as ``TC_B + n D(omega_B||P*_A)``.

    Raises
    ------
    PreconditionError
        If the samples exhibit a point of ``b`` outside ``a``.
    """
    if b.k != a.k or p.k != a.k:
        raise DimensionError("distribution and constraint sets must share an alphabet")
    if samples is None:
        samples = witness_samples(b)
    if not is_subset_witness(b, a, samples):
        raise PreconditionError("the subset claim B ⊆ A is refuted by a sample point")
    if projection is None:
        projection = project(p, a)
    summary_b = summarize(p, n, b, budget)
    d_omega_proj = relative_entropy(summary_b.omega, projection.q_star)
    kl = float(summary_b.total_correlation) + n * float(d_omega_proj)
    rhs = -float(projection.divergence) - kl / n
    lhs = summary_b.log_prob_event / n
    return SubsetBound(
        n=n,
        lhs=lhs,
        rhs=rhs,
        residual=lhs - rhs,
        kl_mu_b_projection=kl,
        log_prob_subset=summary_b.log_prob_event,
    )


@dataclass(frozen=True)
class SweepEntry:
    n: int
    report: BoundsReport | None
    skipped: str | None = None


def sweep(p: Dist, a: ConstraintSet, n_values: Sequence[int],
          budget: int | None = None) -> list[SweepEntry]:
    """One report per sample size; sizes with an empty event are skipped."""
    if p.k != a.k:
        raise DimensionError(f"distribution over {p.k} symbols, constraints over {a.k}")
    projection = project(p, a)
    max_cross = max_cross_entropy(p, a)
    entries = []
    for n in n_values:
        try:
            summary = summarize(p, n, a, budget)
        except EmptyEventError as exc:
            entries.append(SweepEntry(n, None, skipped=str(exc)))
            continue
        entries.append(SweepEntry(n, report_from_parts(p, summary, projection, max_cross)))
    return entries
