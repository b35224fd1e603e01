import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import (central_difference, kl, single_halfspace_projection, slsqp_projection,
                     tilt_k3_closed_form)
from sanov import ConstraintSet, Dist, LinearConstraint, dual_value_and_gradient, eq, ge
from sanov import project, pythagorean_residual, relative_entropy
from sanov.errors import InfeasibleError, InfiniteDivergenceError, PreconditionError

HALF = Dist([0.5, 0.5])


def random_p(rng, k):
    return Dist.normalized(rng.dirichlet(np.ones(k)) + 0.02)


def random_instance(rng, k, m, relations=("eq", "ge", "le")):
    """Random constraint set that a random interior point satisfies."""
    p = random_p(rng, k)
    anchor = rng.dirichlet(np.ones(k))
    cons = []
    for _ in range(m):
        f = rng.normal(size=k)
        rel = rng.choice(relations)
        alpha = float(anchor @ f) + (0.0 if rel == "eq" else rng.uniform(-0.3, 0.3))
        if rel == "ge":
            alpha = min(alpha, float(anchor @ f))
        elif rel == "le":
            alpha = max(alpha, float(anchor @ f))
        cons.append(LinearConstraint(f, rel, alpha))
    return p, ConstraintSet(tuple(cons))


def feasible_points(a, rng, count):
    verts = a.vertices()
    w = rng.dirichlet(np.ones(len(verts)), size=count)
    return [Dist.normalized(np.clip(x, 0, None)) for x in w @ verts]


def test_binary_eq_is_a_singleton():
    proj = project(HALF, ConstraintSet.of(eq([0, 1], 0.8)))
    assert proj.q_star.probs.tolist() == pytest.approx([0.2, 0.8], abs=1e-12)
    assert proj.duals[0] == pytest.approx(math.log(4), abs=1e-9)


def test_binary_ge_active():
    proj = project(HALF, ConstraintSet.of(ge([0, 1], 0.75)))
    assert proj.q_star.probs.tolist() == pytest.approx([0.25, 0.75], abs=1e-12)
    assert float(proj.divergence) == pytest.approx(0.75 * math.log(1.5) + 0.25 * math.log(0.5),
                                                   abs=1e-12)
    assert proj.active == (True,)


def test_k3_tilt_matches_closed_form():
    q, d = tilt_k3_closed_form()
    proj = project(Dist.uniform(3), ConstraintSet.of(eq([0, 1, 2], 1.5)))
    assert np.abs(proj.q_star.probs - q).max() <= 1e-12
    assert float(proj.divergence) == pytest.approx(d, abs=1e-12)


def test_vacuous_set_returns_p():
    p = Dist([0.2, 0.3, 0.5])
    proj = project(p, ConstraintSet.full_simplex(3))
    assert np.abs(proj.q_star.probs - p.probs).max() <= 1e-12
    assert float(proj.divergence) == pytest.approx(0.0, abs=1e-15)


def test_infeasible_raises_with_certificate():
    with pytest.raises(InfeasibleError) as info:
        project(HALF, ConstraintSet.of(ge([0, 1], 0.2), eq([0, 1], 1.5)))
    assert info.value.certificate_index == 1


def test_unreachable_set_raises_infinite_divergence():
    with pytest.raises(InfiniteDivergenceError):
        project(Dist([1.0, 0.0]), ConstraintSet.of(ge([0, 1], 0.5)))


def test_zero_in_p_restricts_support():
    p = Dist([0.5, 0.0, 0.5])
    proj = project(p, ConstraintSet.of(ge([0, 1, 2], 1.5)))
    assert proj.q_star.probs[1] == 0.0
    assert proj.q_star.probs.tolist() == pytest.approx([0.25, 0.0, 0.75], abs=1e-10)


def test_dual_zero_tilt():
    p = Dist([0.2, 0.3, 0.5])
    a = ConstraintSet.of(eq([0, 1, 2], 1.0))
    value, grad = dual_value_and_gradient(p, a, [0.0])
    assert value == pytest.approx(0.0, abs=1e-15)
    assert grad[0] == pytest.approx(1.0 - 1.3, abs=1e-15)


def test_dual_gradient_vanishes_at_closed_form_tilt():
    _, grad = dual_value_and_gradient(HALF, ConstraintSet.of(eq([0, 1], 0.8)), [math.log(4)])
    assert abs(grad[0]) <= 1e-15


@given(st.integers(0, 10**6), st.integers(2, 4), st.integers(1, 2))
def test_dual_gradient_matches_finite_differences(seed, k, m):
    rng = np.random.default_rng(seed)
    p, a = random_instance(rng, k, m, relations=("eq",))
    lam = rng.normal(size=m)
    _, grad = dual_value_and_gradient(p, a, lam)
    fd = central_difference(lambda x: dual_value_and_gradient(p, a, x)[0], lam, h=1e-5)
    assert np.abs(grad - fd).max() <= 1e-6


def test_dual_requires_linear_family():
    with pytest.raises(PreconditionError):
        dual_value_and_gradient(HALF, ConstraintSet.of(ge([0, 1], 0.5)), [0.0])


@given(st.integers(2, 5), st.floats(0.05, 0.95), st.sampled_from(["ge", "le"]),
       st.integers(0, 10**6))
def test_single_halfspace_matches_bisection_oracle(k, frac, rel, seed):
    p = random_p(np.random.default_rng(seed), k)
    f = np.arange(k, dtype=float)
    alpha = frac * (k - 1)
    proj = project(p, ConstraintSet.of(LinearConstraint(f, rel, alpha)))
    ref = single_halfspace_projection(p.probs, f, alpha, rel)
    assert np.abs(proj.q_star.probs - ref).max() <= 1e-9


@pytest.mark.parametrize("seed", range(12))
def test_two_constraints_match_slsqp(seed):
    rng = np.random.default_rng(seed)
    p, a = random_instance(rng, 4, 2)
    proj = project(p, a)
    ref = slsqp_projection(p.probs, [c.f for c in a], [c.relation.value for c in a], a.alphas)
    # the reference minimizer only resolves divergences to about 1e-8
    assert float(proj.divergence) <= kl(ref, p.probs) + 1e-9
    assert float(proj.divergence) == pytest.approx(kl(ref, p.probs), abs=1e-7)


@given(st.integers(0, 10**6), st.integers(2, 4), st.integers(1, 2))
def test_solution_contract(seed, k, m):
    rng = np.random.default_rng(seed)
    p, a = random_instance(rng, k, m)
    proj = project(p, a)
    assert a.contains(proj.q_star)
    assert proj.dual_gradient <= 1e-10
    assert float(proj.divergence) == pytest.approx(float(relative_entropy(proj.q_star, p)),
                                                   abs=1e-12)
    # primal optimality against feasible points near the solution
    for q in feasible_points(a, rng, 100):
        near = Dist.normalized(0.99 * proj.q_star.probs + 0.01 * q.probs)
        assert float(relative_entropy(near, p)) >= float(proj.divergence) - 1e-12


@given(st.integers(0, 10**6), st.integers(2, 4), st.integers(1, 2))
def test_exponential_form_on_support(seed, k, m):
    rng = np.random.default_rng(seed)
    p, a = random_instance(rng, k, m)
    proj = project(p, a)
    s = proj.q_star.probs > 0
    c = np.log(proj.q_star.probs[s]) - np.log(p.probs[s]) - proj.duals @ a.matrix[:, s]
    assert np.ptp(c) <= 1e-8


@given(st.integers(0, 10**6), st.integers(2, 4), st.integers(1, 2))
def test_kkt_signs(seed, k, m):
    rng = np.random.default_rng(seed)
    p, a = random_instance(rng, k, m, relations=("ge", "le"))
    proj = project(p, a)
    values = a.matrix @ proj.q_star.probs
    for c, lam, act, v in zip(a, proj.duals, proj.active, values):
        if not act:
            assert abs(lam) <= 1e-10
        elif c.relation.value == "ge":
            assert lam >= -1e-10
        else:
            assert lam <= 1e-10
        assert abs(lam * (v - c.alpha)) <= 1e-9


@given(st.integers(0, 10**6), st.floats(0.01, 100.0))
def test_rescaling_invariance(seed, scale):
    rng = np.random.default_rng(seed)
    p, a = random_instance(rng, 4, 2)
    scaled = ConstraintSet(tuple(LinearConstraint(scale * c.f, c.relation, scale * c.alpha)
                                 for c in a))
    base, other = project(p, a), project(p, scaled)
    assert np.abs(base.q_star.probs - other.q_star.probs).max() <= 1e-9
    assert np.allclose(other.duals * scale, base.duals, atol=1e-7)


@given(st.integers(0, 10**6), st.integers(2, 4))
def test_pythagorean_inequality_on_random_points(seed, k):
    rng = np.random.default_rng(seed)
    p, a = random_instance(rng, k, 2, relations=("ge", "le"))
    proj = project(p, a)
    for q in feasible_points(a, rng, 20):
        if a.contains(q):
            assert pythagorean_residual(p, a, q, proj).relative >= -1e-9


def test_pythagorean_at_projection_and_ge_vertex():
    a = ConstraintSet.of(ge([0, 1], 0.75))
    proj = project(HALF, a)
    assert abs(pythagorean_residual(HALF, a, proj.q_star, proj).value) <= 1e-12
    assert pythagorean_residual(HALF, a, Dist([0.0, 1.0]), proj).value >= 0


def test_pythagorean_rejects_points_outside():
    with pytest.raises(PreconditionError):
        pythagorean_residual(HALF, ConstraintSet.of(ge([0, 1], 0.75)), Dist([0.5, 0.5]))


def test_pythagorean_matched_infinity():
    p = Dist([0.5, 0.0, 0.5])
    a = ConstraintSet.of(ge([0, 1, 2], 0.5))
    r = pythagorean_residual(p, a, Dist([0.0, 1.0, 0.0]))
    assert r.matched_infinity
