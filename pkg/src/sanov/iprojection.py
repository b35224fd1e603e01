"""I-projection of a distribution onto a polyhedral constraint set.

The minimizer of ``D(q || p)`` over ``{q : <f_i, q> (rel_i) alpha_i}`` is an
exponential tilt ``q(x) ∝ p(x) exp(sum_i lambda_i f_i(x))``.  The multipliers
maximize the concave dual

    g(lambda) = <lambda, alpha> - ln sum_x p(x) exp(<lambda, f(x)>)

which is solved here by damped Newton steps, with inequality constraints
handled by an active-set loop.  Before solving, the symbols that no feasible
distribution can charge are found from the vertices of the feasible polytope
and dropped; this keeps the optimal multipliers finite when the solution sits
on a face of the simplex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .constraints import ConstraintSet, Relation
from .errors import (ConvergenceError, DimensionError, InfiniteDivergenceError,
                     PreconditionError)
from .measures import Dist, InfoValue, Residual, relative_entropy

GRADIENT_TOLERANCE = 1e-10
MAX_NEWTON_ITERATIONS = 200
DIVERGENCE_NORM = 1e6
SIGN_TOLERANCE = 1e-12
# well inside the 1e-12 membership tolerance so q_star always tests as a member
FEASIBILITY_TOLERANCE = 1e-13


@dataclass(frozen=True)
class IProjection:
    """Result of :func:`project`.

    ``duals`` has one multiplier per constraint (zero for inactive ones) and
    ``active`` flags the constraints in the final working set; equality
    constraints are always active.
    """

    q_star: Dist
    duals: np.ndarray
    divergence: InfoValue
    active: tuple[bool, ...]
    dual_gradient: float
    newton_iterations: int


class _SubproblemFailed(Exception):
    pass


def _tilt(logp, F, lam):
    theta = logp + lam @ F
    lz = logsumexp(theta)
    return np.exp(theta - lz), lz


def _newton(logp, F, alpha, lam0, tol=GRADIENT_TOLERANCE, max_iter=MAX_NEWTON_ITERATIONS):
    """Maximize the tilt dual for equality rows ``F q = alpha`` over the symbols in ``logp``.

    Returns ``(lambda, q, max|grad|, iterations)``.
    """
    lam = np.array(lam0, dtype=float)
    m = len(alpha)
    if m == 0:
        q, _ = _tilt(logp, F.reshape(0, logp.size), lam)
        return lam, q, 0.0, 0
    q, lz = _tilt(logp, F, lam)
    value = lam @ alpha - lz
    grad = alpha - F @ q
    gnorm = np.abs(grad).max()
    polish = 0
    for it in range(1, max_iter + 1):
        if gnorm <= tol:
            # a couple of extra steps while they still help: constraint residuals
            # must also meet the much tighter membership tolerance
            polish += 1
            if polish > 3 or gnorm == 0.0:
                return lam, q, gnorm, it - 1
        mean = F @ q
        cov = (F * q) @ F.T - np.outer(mean, mean)
        step = np.linalg.pinv(cov, rcond=1e-12) @ grad
        slope = grad @ step
        if not slope > 0:
            step, slope = grad, grad @ grad
        t = 1.0
        while True:
            lam_new = lam + t * step
            q_new, lz_new = _tilt(logp, F, lam_new)
            value_new = lam_new @ alpha - lz_new
            grad_new = alpha - F @ q_new
            gnorm_new = np.abs(grad_new).max()
            if value_new >= value + 1e-4 * t * slope:
                break
            # near the optimum the value is flat to rounding; judge by the gradient
            if value_new >= value - 1e-14 * max(1.0, abs(value)) and gnorm_new < gnorm:
                break
            t *= 0.5
            if t < 1e-12:
                if gnorm <= tol:
                    return lam, q, gnorm, it
                raise _SubproblemFailed(f"line search stalled at |grad| = {gnorm:.3g}")
        if gnorm <= tol and gnorm_new >= gnorm:
            return lam, q, gnorm, it
        lam, q, value, grad, gnorm = lam_new, q_new, value_new, grad_new, gnorm_new
        if np.abs(lam).max() > DIVERGENCE_NORM:
            raise _SubproblemFailed(
                f"multipliers diverged (|lambda| = {np.abs(lam).max():.3g}, |grad| = {gnorm:.3g})")
    if gnorm <= tol:
        return lam, q, gnorm, max_iter
    raise _SubproblemFailed(f"no convergence in {max_iter} Newton iterations, |grad| = {gnorm:.3g}")


def _rows(a: ConstraintSet, idx, support):
    F = a.matrix[np.asarray(idx, dtype=int)][:, support] if len(idx) else np.zeros((0, support.sum()))
    alpha = a.alphas[np.asarray(idx, dtype=int)] if len(idx) else np.zeros(0)
    return F, alpha


def _violation(a, i, q_full):
    """How far ``q`` violates inequality ``i`` (positive = violated)."""
    c = a[i]
    v = c.f @ q_full
    scale = max(1.0, np.abs(c.f).max())
    gap = (c.alpha - v) if c.relation is Relation.GE else (v - c.alpha)
    return gap / scale


def _wrong_sign(relation, lam):
    """How far a multiplier has the wrong sign for its inequality (positive = wrong)."""
    return -lam if relation is Relation.GE else lam


def project(p: Dist, a: ConstraintSet) -> IProjection:
    """The I-projection of ``p`` onto ``a``.

    Raises
    ------
    InfeasibleError
        If ``a`` is empty; ``certificate_index`` names the first constraint
        that cannot be met together with the ones before it.
    InfiniteDivergenceError
        If every member of ``a`` charges a symbol where ``p`` is zero.
    ConvergenceError
        If the solver fails to reach its gradient tolerance.
    """
    if p.k != a.k:
        raise DimensionError(f"distribution over {p.k} symbols, constraints over {a.k}")
    a.check_feasible()
    if not len(a.vertices(allowed=p.support)):
        raise InfiniteDivergenceError(
            "every distribution in the constraint set charges a symbol of zero probability")
    support = a.support(allowed=p.support)
    with np.errstate(divide="ignore"):
        logp = np.log(p.probs[support])
    logp = logp - logsumexp(logp)

    m = len(a)
    eq_idx = [i for i, c in enumerate(a) if c.relation is Relation.EQ]
    ineq_idx = [i for i, c in enumerate(a) if c.relation is not Relation.EQ]

    def solve(working, lam_start):
        idx = eq_idx + sorted(working)
        F, alpha = _rows(a, idx, support)
        lam0 = np.array([lam_start.get(i, 0.0) for i in idx])
        lam, q, gnorm, iters = _newton(logp, F, alpha, lam0)
        q_full = np.zeros(a.k)
        q_full[support] = q
        return dict(zip(idx, lam)), q_full, gnorm, iters

    start = np.zeros(a.k)
    start[support] = np.exp(logp)
    working = {i for i in ineq_idx if _violation(a, i, start) > 0}
    lam_map, total_iters, result = {}, 0, None
    try:
        for _ in range(4 * len(ineq_idx) + 10):
            lam_map, q_full, gnorm, iters = solve(working, lam_map)
            total_iters += iters
            outside = [(i, _violation(a, i, q_full)) for i in ineq_idx if i not in working]
            outside = [(i, v) for i, v in outside if v > FEASIBILITY_TOLERANCE]
            if outside:
                working.add(max(outside, key=lambda iv: iv[1])[0])
                continue
            wrong = [(i, _wrong_sign(a[i].relation, lam_map[i])) for i in working]
            wrong = [(i, w) for i, w in wrong if w > SIGN_TOLERANCE]
            if wrong:
                drop = max(wrong, key=lambda iw: iw[1])[0]
                working.discard(drop)
                lam_map.pop(drop)
                continue
            result = (lam_map, q_full, gnorm, working)
            break
    except _SubproblemFailed:
        result = None
    if result is None:
        result = _exhaustive(p, a, ineq_idx, solve)
        total_iters += result[-1]
        result = result[:-1]
    lam_map, q_full, gnorm, working = result

    duals = np.zeros(m)
    for i, lam in lam_map.items():
        duals[i] = lam
    q_star = Dist(q_full)
    active = tuple(c.relation is Relation.EQ or i in working for i, c in enumerate(a))
    return IProjection(
        q_star=q_star,
        duals=duals,
        divergence=relative_entropy(q_star, p),
        active=active,
        dual_gradient=float(gnorm),
        newton_iterations=total_iters,
    )


def _exhaustive(p, a, ineq_idx, solve):
    """Try every working set; the KKT point is the feasible candidate of least divergence."""
    best, iters, last_error = None, 0, None
    for r in range(len(ineq_idx) + 1):
        for working in itertools.combinations(ineq_idx, r):
            try:
                lam_map, q_full, gnorm, it = solve(set(working), {})
            except _SubproblemFailed as exc:
                last_error = exc
                continue
            iters += it
            if any(_violation(a, i, q_full) > FEASIBILITY_TOLERANCE for i in ineq_idx):
                continue
            if any(_wrong_sign(a[i].relation, lam_map[i]) > SIGN_TOLERANCE for i in working):
                continue
            pos = q_full > 0
            score = math.fsum(q_full[pos] * (np.log(q_full[pos]) - np.log(p.probs[pos])))
            if best is None or score < best[0]:
                best = (score, (lam_map, q_full, gnorm, set(working)))
    if best is None:
        raise ConvergenceError(f"active-set search found no KKT point ({last_error})")
    return (*best[1], iters)


def dual_value_and_gradient(p: Dist, a: ConstraintSet, lambdas) -> tuple[float, np.ndarray]:
    """Tilt dual ``g(lambda)`` and its gradient ``alpha - E_{q_lambda}[f]`` for a linear family."""
    if p.k != a.k:
        raise DimensionError(f"distribution over {p.k} symbols, constraints over {a.k}")
    if not a.is_linear_family():
        raise PreconditionError("the dual is defined here for equality constraints only")
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (len(a),):
        raise DimensionError(f"expected {len(a)} multipliers, got shape {lam.shape}")
    support = p.support
    q, lz = _tilt(np.log(p.probs[support]), a.matrix[:, support], lam)
    value = float(lam @ a.alphas - lz)
    return value, a.alphas - a.matrix[:, support] @ q


def pythagorean_residual(p: Dist, a: ConstraintSet, q: Dist,
                         projection: IProjection | None = None) -> Residual:
    """Signed ``D(q||p) - D(q||q*) - D(q*||p)`` for ``q`` in ``a``.

    Nonnegative for every convex ``a``, zero for linear families.
    """
    if not a.contains(q):
        raise PreconditionError("q does not belong to the constraint set")
    if projection is None:
        projection = project(p, a)
    q_star = projection.q_star
    d_qp = relative_entropy(q, p)
    d_qs = relative_entropy(q, q_star)
    d_sp = projection.divergence
    if d_qp.infinite or d_qs.infinite or d_sp.infinite:
        if d_qp.infinite and (d_qs.infinite or d_sp.infinite):
            return Residual(0.0, matched_infinity=True)
        return Residual(-math.inf)
    value = float(d_qp) - float(d_qs) - float(d_sp)
    return Residual(value, scale=float(d_qp))
