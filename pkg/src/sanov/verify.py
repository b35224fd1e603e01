"""Run every exact identity and bound on one problem instance.

Each check reports its residual next to the tolerance it was held to.
Relative checks divide by ``max(1, scale)`` of the largest term involved.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .bounds import report_from_parts, max_cross_entropy, subset_report
from .conditional import core_identity_check, kl_to_product, summarize
from .constraints import ConstraintSet
from .iprojection import project, pythagorean_residual
from .measures import Dist, relative_entropy
from .typespace import brute_force_conditional

TOLERANCE = 1e-9
ORACLE_LIMIT = 10**5


@dataclass(frozen=True)
class Check:
    name: str
    status: str  # "pass", "fail" or "skip"
    residual: float | None
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"


def _check(name, residual, tol, ok=None, detail=""):
    if ok is None:
        ok = residual <= tol
    return Check(name, "pass" if ok else "fail", float(residual), tol, detail)


def verify_suite(p: Dist, n: int, a: ConstraintSet, q: Dist | None = None,
                 subset: ConstraintSet | None = None, budget: int | None = None,
                 oracle_limit: int = ORACLE_LIMIT,
                 omega_override: Dist | None = None) -> list[Check]:
    """Evaluate the identity suite on ``(p, n, a)``.

    ``q`` is the reference for the change-of-reference identity (default:
    the I-projection), ``subset`` the set ``B`` for the subset bound
    (default: ``a`` itself).  ``omega_override`` replaces the computed
    marginal before the checks run; it exists to confirm that the checks can
    fail.
    """
    tol = TOLERANCE
    summary = summarize(p, n, a, budget)
    if omega_override is not None:
        summary = dataclasses.replace(
            summary, omega=omega_override, kl_omega_p=relative_entropy(omega_override, p))
    projection = project(p, a)
    report = report_from_parts(p, summary, projection, max_cross_entropy(p, a))
    omega = summary.omega
    checks = []

    identity = summary.identity_residual()
    checks.append(_check("exact_identity", identity.relative, tol,
                         detail="-ln P(A) = n D(omega||P) + TC"))

    tc_direct = kl_to_product(p, n, a, omega, budget, summary.log_prob_event)
    scale = max(1.0, abs(float(tc_direct)), float(summary.entropy_mu))
    checks.append(_check("total_correlation_decomposition",
                         abs(float(summary.total_correlation) - float(tc_direct)) / scale, tol,
                         detail="D(mu||omega^n) = n H(omega) - H(mu)"))

    reference = projection.q_star if q is None else q
    core = core_identity_check(p, n, a, reference, budget, summary=summary)
    checks.append(_check("change_of_reference", core.relative, tol,
                         ok=core.matched_infinity or core.relative <= tol,
                         detail="D(mu||Q^n) - D(mu||omega^n) = n D(omega||Q)"
                         + (" (both sides infinite)" if core.matched_infinity else "")))

    in_set = a.contains(omega)
    worst = float(max(0.0, -a.slack(omega).min()))
    checks.append(_check("marginal_in_set", worst, a.boundary_tolerance, ok=in_set,
                         detail="omega_A belongs to A"))

    if in_set:
        pyth = pythagorean_residual(p, a, omega, projection)
        if a.is_linear_family():
            checks.append(_check("pythagorean", abs(pyth.relative), tol,
                                 ok=pyth.matched_infinity or abs(pyth.relative) <= tol,
                                 detail="equality at omega_A (linear family)"))
        else:
            checks.append(_check("pythagorean", max(0.0, -pyth.relative), tol,
                                 ok=pyth.matched_infinity or pyth.relative >= -tol,
                                 detail="inequality at omega_A"))
    else:
        checks.append(Check("pythagorean", "skip", None, tol, "omega_A not in A"))

    b = a if subset is None else subset
    sub = subset_report(p, n, a, b, budget, projection=projection)
    scale = max(1.0, abs(sub.lhs))
    if a.is_linear_family() and subset is None:
        checks.append(_check("subset_bound", abs(sub.residual) / scale, tol,
                             detail="equality for a linear family with B = A"))
    else:
        checks.append(_check("subset_bound", max(0.0, sub.residual) / scale, tol,
                             detail="(1/n) ln P(B) <= -D(P*||P) - (1/n) D(mu_B||P*^n)"))

    checks.append(_check("rate_identity", report.identity_residual(), tol,
                         detail="rate = -D(omega||P) - TC/n"))
    checks.append(_check("bound_ordering", max(0.0, report.ordering_violation()), tol,
                         detail="-max H(Q,P) <= -H(omega,P) <= rate <= -D(omega||P) <= -D(P*||P)"))

    if p.k**n <= oracle_limit:
        oracle = brute_force_conditional(p, n, lambda t: a.contains_type(t))
        diffs = [
            abs(np.exp(oracle.log_prob_event) - summary.prob_event),
            float(np.abs(oracle.omega - omega.probs).max()),
            abs(oracle.entropy_mu - float(summary.entropy_mu)),
            abs(oracle.total_correlation - float(summary.total_correlation)),
        ]
        checks.append(_check("sequence_oracle", max(diffs), tol,
                             detail="P(A), omega, H(mu), TC against k**n sequence enumeration"))
    else:
        checks.append(Check("sequence_oracle", "skip", None, tol,
                            f"k**n = {p.k**n} exceeds {oracle_limit}"))
    return checks
