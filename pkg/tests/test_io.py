import json

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from steklov_extremal import io

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.lists(finite, min_size=1, max_size=20))
def test_json_float_round_trip(values):
    back = json.loads(io.dumps({"v": values}))["v"]
    assert back == values


@given(st.lists(finite, min_size=1, max_size=20))
def test_csv_round_trip(tmp_path_factory, values):
    p = tmp_path_factory.mktemp("csv") / "t.csv"
    io.write_csv(p, ["a", "b"], [values, values[::-1]])
    header, arr = io.read_csv(p)
    assert header == ["a", "b"]
    assert arr[:, 0].tolist() == values
    assert arr[:, 1].tolist() == values[::-1]


def test_dumps_layout():
    text = io.dumps({"x": np.float64(0.1), "n": np.int64(3), "ok": np.bool_(True), "l": [1, 2.5], "s": None})
    assert text.endswith("}\n")
    assert '"x": 0.10000000000000001' in text
    assert '"l": [1, 2.5]' in text
    assert json.loads(text) == {"x": 0.1, "n": 3, "ok": True, "l": [1, 2.5], "s": None}


def test_dumps_nested_and_empty():
    obj = {"a": [], "b": {}, "c": [{"d": 1}]}
    assert json.loads(io.dumps(obj)) == obj


def test_dumps_rejects_unknown():
    try:
        io.dumps({"x": object()})
    except TypeError:
        return
    raise AssertionError("expected TypeError")
