import json
import math
from fractions import Fraction

import numpy as np
import pytest

from polyharmonic.core import ProblemSpec
from polyharmonic.io import (
    SCHEMA_VERSION,
    dumps,
    profile_columns,
    read_profile_csv,
    to_jsonable,
    write_profile_csv,
)
from polyharmonic.shooting import solve_ivp


def test_profile_csv_round_trip_is_lossless(tmp_path):
    spec = ProblemSpec(5, 2, "1/3", -1)
    p, _ = solve_ivp(spec, [1.0, 0.25], 3.0)
    path = tmp_path / "p.csv"
    write_profile_csv(path, p)
    q = read_profile_csv(path)
    assert q.spec == spec and q.spec.alpha_exact == Fraction(1, 3)
    assert np.array_equal(p.r, q.r)
    assert np.array_equal(p.values, q.values)
    assert np.array_equal(p.slopes, q.slopes)
    assert q.meta["tol"] == p.meta["tol"]


def test_profile_csv_layout(tmp_path):
    p, _ = solve_ivp(ProblemSpec(3, 3, 2, 1), [1.0, 0.0, 0.0], 0.5)
    path = tmp_path / "p.csv"
    write_profile_csv(path, p)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# Delta^3 u = +u^2 in R^3")
    header = [ln for ln in lines if not ln.startswith("#")][0]
    assert header.split(",") == ["r", "v0", "v1", "v2", "dv0", "dv1", "dv2"]
    assert profile_columns(1) == ["r", "v0", "dv0"]


def test_inexact_alpha_round_trip(tmp_path):
    spec = ProblemSpec(3, 1, "0.3", -1)
    p, _ = solve_ivp(spec, [1.0], 1.0)
    path = tmp_path / "p.csv"
    write_profile_csv(path, p)
    q = read_profile_csv(path)
    assert not q.spec.is_exact and q.spec.alpha == 0.3


def test_read_rejects_headerless(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("r,v0,dv0\n0,1,0\n")
    with pytest.raises(ValueError):
        read_profile_csv(path)


def test_jsonable_conversions():
    out = to_jsonable({"a": Fraction(3, 4), "b": Fraction(4), "c": math.inf, "d": np.float64(2.5),
                       "e": np.arange(2), "f": (1, None)})
    assert out == {"a": "3/4", "b": 4, "c": "inf", "d": 2.5, "e": [0, 1], "f": [1, None]}
    doc = json.loads(dumps({"x": 1}, "demo"))
    assert doc["schema"] == SCHEMA_VERSION and doc["kind"] == "demo"
