"""Profile CSV and versioned JSON output."""
from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import ProblemSpec
from .profile import RadialProfile

__all__ = ["SCHEMA_VERSION", "to_jsonable", "dumps", "write_json", "write_profile_csv",
           "read_profile_csv", "profile_columns"]

SCHEMA_VERSION = "polyharmonic/1"


def to_jsonable(obj):
    """Recursively convert results to plain JSON types.

    Fractions become ``"p/q"`` strings, non-finite floats become
    ``"inf"``/``"-inf"``/``"nan"``, and objects with ``to_json`` use it.
    """
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else int(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    return str(obj)


def dumps(payload: dict, kind: str) -> str:
    doc = {"schema": SCHEMA_VERSION, "kind": kind}
    doc.update(to_jsonable(payload))
    return json.dumps(doc, indent=2, sort_keys=False)


def write_json(path, payload: dict, kind: str):
    Path(path).write_text(dumps(payload, kind) + "\n", encoding="utf-8")


def profile_columns(m):
    return ["r"] + [f"v{i}" for i in range(m)] + [f"dv{i}" for i in range(m)]


def write_profile_csv(path, profile: RadialProfile):
    """Write ``r, v_0..v_{m-1}, v_0'..v_{m-1}'`` with 17 significant digits.

    Leading ``#`` lines echo the problem and run metadata as JSON.
    """
    spec = profile.spec
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {spec.describe()}\n")
        fh.write("# spec " + json.dumps(to_jsonable(spec.to_json())) + "\n")
        fh.write("# meta " + json.dumps(to_jsonable(profile.meta)) + "\n")
        w = csv.writer(fh)
        w.writerow(profile_columns(spec.m))
        for j in range(profile.r.size):
            row = [profile.r[j], *profile.values[j], *profile.slopes[j]]
            w.writerow([f"{x:.17g}" for x in row])


def read_profile_csv(path) -> RadialProfile:
    """Inverse of :func:`write_profile_csv`; doubles round-trip exactly."""
    spec_json, meta = None, {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# spec "):
                spec_json = json.loads(line[len("# spec "):])
            elif line.startswith("# meta "):
                meta = json.loads(line[len("# meta "):])
            elif not line.startswith("#"):
                rows.append(line)
    if spec_json is None:
        raise ValueError(f"{path}: missing spec header")
    spec = ProblemSpec(spec_json["n"], spec_json["m"],
                       spec_json["alpha"] if spec_json["alpha_exact"] else spec_json["alpha_float"],
                       spec_json["sign"])
    reader = csv.reader(rows)
    header = next(reader)
    if header != profile_columns(spec.m):
        raise ValueError(f"{path}: unexpected columns {header}")
    data = np.array([[float(x) for x in row] for row in reader if row])
    m = spec.m
    return RadialProfile(spec, data[:, 0], data[:, 1:1 + m], data[:, 1 + m:], meta)
