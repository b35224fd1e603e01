import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sanov import ConstraintSet, Dist, LinearConstraint, TypeVector, eq, ge, is_subset_witness, le
from sanov.errors import DimensionError, InfeasibleError, ValidationError
from sanov.typespace import type_blocks


def test_boundary_type_is_a_member():
    a = ConstraintSet.of(ge([0, 1], 0.75))
    assert a.contains_type(TypeVector((1, 3)))
    assert not a.contains_type(TypeVector((2, 2)))


def test_boundary_survives_float_roundoff():
    # 0.1 + 0.2 lands 5.6e-17 above 0.3 in floating point
    a = ConstraintSet.of(eq([1, 1, 0], 0.3))
    assert a.contains(Dist([0.1, 0.2, 0.7]))
    assert ConstraintSet.of(le([1, 1, 0], 0.3)).contains(Dist([0.1, 0.2, 0.7]))


def test_eq_membership_for_odd_n_is_empty():
    a = ConstraintSet.of(eq([0, 1], 0.5))
    assert not any(a.contains_type(TypeVector((j, 3 - j))) for j in range(4))


def test_vacuous_set_contains_every_type():
    a = ConstraintSet.full_simplex(3)
    counts = np.vstack(list(type_blocks(3, 5)))
    assert a.contains_counts(counts, 5).all()


@given(st.integers(2, 4), st.integers(1, 8), st.floats(0, 3), st.sampled_from(["eq", "ge", "le"]))
def test_vectorized_membership_matches_scalar(k, n, alpha, rel):
    f = np.arange(k, dtype=float)
    a = ConstraintSet.of(LinearConstraint(f, rel, alpha))
    counts = np.vstack(list(type_blocks(k, n)))
    fast = a.contains_counts(counts, n)
    slow = [a.contains_type(TypeVector(tuple(c))) for c in counts.tolist()]
    assert fast.tolist() == slow


def test_dict_round_trip():
    a = ConstraintSet.of(ge([0, 1, 2], 0.5), le([1, 0, 0], 0.4))
    assert ConstraintSet.from_dicts(a.to_dicts()).to_dicts() == a.to_dicts()


@pytest.mark.parametrize("kwargs", [
    dict(f=[1.0], relation="ge", alpha=0.0),
    dict(f=[0, float("inf")], relation="ge", alpha=0.0),
    dict(f=[0, 1], relation="gt", alpha=0.0),
    dict(f=[0, 1], relation="ge", alpha=float("nan")),
])
def test_constraint_validation(kwargs):
    with pytest.raises(ValidationError):
        LinearConstraint(**kwargs)


def test_mixed_alphabet_sizes_rejected():
    with pytest.raises(DimensionError):
        ConstraintSet.of(ge([0, 1], 0.5), ge([0, 1, 2], 0.5))
    with pytest.raises(DimensionError):
        ConstraintSet.of(ge([0, 1], 0.5)).contains(Dist.uniform(3))


def test_vertices_of_segment():
    verts = ConstraintSet.of(ge([0, 1], 0.75)).vertices()
    assert np.allclose(sorted(verts.tolist()), [[0.0, 1.0], [0.25, 0.75]])


def test_infeasible_single_constraint_certificate():
    a = ConstraintSet.of(eq([0, 1, 2], 2.5))
    with pytest.raises(InfeasibleError) as info:
        a.check_feasible()
    assert info.value.certificate_index == 0
    assert info.value.achievable_range == (0.0, 2.0)


def test_infeasible_pair_certificate_names_second_constraint():
    a = ConstraintSet.of(ge([0, 1], 0.7), le([0, 1], 0.6), ge([1, 0], 0.0))
    with pytest.raises(InfeasibleError) as info:
        a.check_feasible()
    assert info.value.certificate_index == 1


def test_support_excludes_forced_zero_symbols():
    a = ConstraintSet.of(eq([0, 1, 2], 2.0))
    assert a.support().tolist() == [False, False, True]


def test_subset_witness():
    a = ConstraintSet.of(ge([0, 1], 0.75))
    b = ConstraintSet.of(ge([0, 1], 0.9))
    grid = [Dist([1 - x, x]) for x in np.linspace(0, 1, 101)]
    assert is_subset_witness(b, a, grid)
    assert not is_subset_witness(a, b, grid)
