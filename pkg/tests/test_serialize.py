"""Round-trip tests for the full-precision JSON writer."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from duosolve import serialize


def test_nested_structure_roundtrip():
    doc = {
        "name": "case",
        "n": 35,
        "ok": True,
        "skip": False,
        "none": None,
        "vals": [1.5, 2, -0.25],
        "mat": np.array([[1.0, 2.0], [3.0, 4.0]]),
        "sub": {"empty_list": [], "empty_dict": {}},
    }
    back = json.loads(serialize.dumps17(doc))
    assert back["name"] == "case"
    assert back["n"] == 35
    assert back["ok"] is True and back["skip"] is False
    assert back["none"] is None
    assert back["vals"] == [1.5, 2, -0.25]
    assert back["mat"] == [[1.0, 2.0], [3.0, 4.0]]
    assert back["sub"] == {"empty_list": [], "empty_dict": {}}


@given(st.floats(allow_nan=False, allow_infinity=False))
@settings(max_examples=200, deadline=None)
def test_floats_roundtrip_bit_exactly(x):
    back = json.loads(serialize.dumps17({"x": x}))["x"]
    assert back == x or (x == 0.0 and back == 0.0)
    # bitwise, not just ==, except that -0.0 == 0.0 comparisons are fine here
    assert math.copysign(1.0, back) == math.copysign(1.0, x) or x == 0.0


def test_seventeen_digits_distinguish_neighbors():
    x = 0.1
    y = np.nextafter(x, 1.0)
    sx = serialize.dumps17(x)
    sy = serialize.dumps17(y)
    assert sx != sy
    assert json.loads(sy) == y


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        serialize.dumps17(float("nan"))
    with pytest.raises(ValueError):
        serialize.dumps17([1.0, float("inf")])


def test_string_escaping():
    s = 'quote " backslash \\ newline \n tab \t bell \x07'
    back = json.loads(serialize.dumps17({"s": s}))["s"]
    assert back == s


def test_unknown_type_rejected():
    with pytest.raises(TypeError):
        serialize.dumps17(object())


def test_log10_or_none():
    assert serialize.log10_or_none(100.0) == pytest.approx(2.0)
    assert serialize.log10_or_none(0.0) is None
    assert serialize.log10_or_none(-1.0) is None
    assert serialize.log10_or_none(None) is None
    assert serialize.log10_or_none(float("nan")) is None
