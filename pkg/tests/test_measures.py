import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sanov import Dist, InfoValue, Residual, cross_entropy, entropy, relative_entropy
from sanov.errors import DimensionError, ValidationError


def dists(k_min=2, k_max=5, positive=False):
    lo = 0.05 if positive else 0.0
    return st.integers(k_min, k_max).flatmap(
        lambda k: st.lists(st.floats(lo, 1.0), min_size=k, max_size=k)
        .filter(lambda w: sum(w) > 0.1)
        .map(Dist.normalized))


def test_binary_entropy_value():
    assert float(entropy(Dist([0.2, 0.8]))) == pytest.approx(0.5004024235381879, abs=1e-15)


def test_relative_entropy_to_uniform():
    d = relative_entropy(Dist([0.2, 0.8]), Dist([0.5, 0.5]))
    assert float(d) == pytest.approx(math.log(2) - 0.5004024235381879, abs=1e-15)


def test_relative_entropy_infinite_off_support():
    d = relative_entropy(Dist([0.5, 0.5]), Dist([1.0, 0.0]))
    assert d.infinite and not d.is_finite and math.isinf(float(d))


def test_relative_entropy_finite_when_q_inside_support():
    assert relative_entropy(Dist([1.0, 0.0]), Dist([0.5, 0.5])).is_finite


def test_cross_entropy_infinite_off_support():
    assert cross_entropy(Dist([0.5, 0.5]), Dist([1.0, 0.0])).infinite


@pytest.mark.parametrize("probs", [[0.5, 0.6], [1.2, -0.2], [1.0], [float("nan"), 1.0], [[0.5, 0.5]]])
def test_dist_rejects_invalid(probs):
    with pytest.raises(ValidationError):
        Dist(probs)


def test_dist_accepts_roundoff_within_tolerance():
    Dist([0.1] * 10)


def test_dist_is_immutable_and_hashable():
    d = Dist([0.25, 0.75])
    with pytest.raises(ValueError):
        d.probs[0] = 0.5
    assert hash(d) == hash(Dist([0.25, 0.75])) and d == Dist([0.25, 0.75])
    assert d.support.tolist() == [True, True]


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        relative_entropy(Dist([0.5, 0.5]), Dist.uniform(3))


def test_info_value_rejects_nan_and_bare_infinity():
    with pytest.raises(ValidationError):
        InfoValue(float("nan"))
    with pytest.raises(ValidationError):
        InfoValue(math.inf)


def test_residual_relative_scale():
    assert Residual(2e-9, scale=4.0).relative == pytest.approx(5e-10)
    assert Residual(2e-9, scale=0.5).relative == 2e-9


@given(dists(), st.data())
def test_relative_entropy_nonnegative_and_zero_on_self(q, data):
    p = data.draw(dists(q.k, q.k))
    d = relative_entropy(q, p)
    assert float(d) >= 0
    assert float(relative_entropy(q, q)) == pytest.approx(0, abs=1e-15)


@given(dists(positive=True), st.data())
def test_cross_entropy_splits_into_entropy_plus_divergence(q, data):
    p = data.draw(dists(q.k, q.k, positive=True))
    lhs = float(cross_entropy(q, p))
    rhs = float(entropy(q)) + float(relative_entropy(q, p))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@given(dists())
def test_entropy_bounded_by_log_k(q):
    assert 0 <= float(entropy(q)) <= math.log(q.k) + 1e-12


@given(dists(positive=True), st.data())
def test_relative_entropy_matches_direct_sum(q, data):
    p = data.draw(dists(q.k, q.k, positive=True))
    m = q.probs > 0
    direct = float(np.sum(q.probs[m] * np.log(q.probs[m] / p.probs[m])))
    assert float(relative_entropy(q, p)) == pytest.approx(max(direct, 0.0), abs=1e-13)
