import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sanov import ConstraintSet, Dist, ge, sweep
from sanov.reports import dumps, format_float, real, sweep_csv


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_floats_round_trip_exactly(x):
    assert float(format_float(x)) == x
    assert json.loads(dumps({"x": x}))["x"] == x


def test_infinities_and_negative_zero():
    assert real(math.inf) == "Infinity" and real(-math.inf) == "-Infinity"
    assert dumps([-0.0]) == "[0]\n"
    with pytest.raises(ValueError):
        real(math.nan)


def test_field_order_is_preserved():
    text = dumps({"b": 1, "a": [1.5, 2], "c": {"z": None, "y": True}})
    assert list(json.loads(text)) == ["b", "a", "c"]
    assert text == dumps({"b": 1, "a": [1.5, 2], "c": {"z": None, "y": True}})


def test_sweep_csv_rows():
    entries = sweep(Dist([0.5, 0.5]), ConstraintSet.of(ge([0, 1], 0.75)), [4, 8])
    lines = sweep_csv(entries).splitlines()
    assert lines[0] == "n,exact_rate,ub_marginal,ub_iproj,lb_cross,lb_maxcross,tc_slack,gap,status"
    first = lines[1].split(",")
    assert first[0] == "4" and first[-1] == "ok"
    assert float(first[1]) == entries[0].report.exact_rate
    assert float(first[1]) == pytest.approx(math.log(0.3125) / 4, abs=1e-15)
