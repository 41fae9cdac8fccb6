import json
import math

import numpy as np

from heisengeo import report
from heisengeo.group import HeisPoint


def test_floats_round_trip_exactly():
    x = 0.1 + 0.2
    text = report.dumps({"x": x, "arr": np.array([1 / 3, 2.0])})
    back = json.loads(text)
    assert back["x"] == x and back["arr"][0] == 1 / 3
    assert "0.30000000000000004" in text


def test_sorted_keys_and_specials():
    text = report.dumps({"b": math.inf, "a": math.nan, "c": -0.0, "d": np.bool_(True), "e": np.int64(3)})
    back = json.loads(text)
    assert list(back) == ["a", "b", "c", "d", "e"]
    assert back == {"a": "nan", "b": "inf", "c": 0, "d": True, "e": 3}


def test_objects_with_to_dict():
    assert json.loads(report.dumps({"p": HeisPoint([1.0, 2.0], 3.0)})) == {"p": {"t": 3, "z": [1, 2]}}


def test_deterministic():
    data = {"z": [0.1, {"y": 1e-300, "x": None}], "a": "s"}
    assert report.dumps(data) == report.dumps(dict(reversed(list(data.items()))))


def test_csv_rows():
    text = report.rows_to_csv(["k", "v"], [[1, 0.1], [2, True]])
    assert text == "k,v\n1,0.10000000000000001\n2,True\n"
