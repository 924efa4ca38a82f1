"""Deterministic JSON serialisation for snapshot files.

All artefacts this package writes (map snapshots, model snapshots, reports)
go through :func:`canonical_dumps` so that identical in-memory state always
produces byte-identical files.  Rules:

* dict keys are emitted in sorted order, list order is preserved,
* floats are written with 17 significant digits, which round-trips any IEEE
  double exactly through ``json.loads``,
* a float that would print as a bare integer gets a trailing ``.0`` so the
  reader gets a float back, not an int,
* non-finite floats are rejected; callers encode them explicitly (the model
  snapshot stores an infinite relative distance as the string ``"inf"``).
"""

from __future__ import annotations

import json
import math
from typing import Any

__all__ = ["canonical_dumps", "dump_file", "load_file", "encode_float", "decode_float"]

INF_TOKEN = "inf"


def encode_float(x: float) -> float | str:
    """Map a possibly-infinite distance value to its JSON form."""
    if math.isinf(x):
        return INF_TOKEN
    return float(x)


def decode_float(v: float | int | str) -> float:
    """Inverse of :func:`encode_float`."""
    if v == INF_TOKEN:
        return math.inf
    return float(v)


def _float_repr(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite float reached the JSON writer; encode it first")
    s = format(x, ".17g")
    if not any(c in s for c in ".eE"):
        s += ".0"
    return s


def _write(obj: Any, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float_repr(obj))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be str, got {type(key).__name__}")
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=True))
            out.append(":")
            _write(obj[key], out)
        out.append("}")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__} canonically")


def canonical_dumps(obj: Any) -> str:
    parts: list[str] = []
    _write(obj, parts)
    return "".join(parts)


def dump_file(path, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(obj))
        fh.write("\n")


def load_file(path) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
