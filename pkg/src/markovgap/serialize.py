"""Deterministic JSON emission with 17-significant-digit scientific floats.

The standard json module formats floats with shortest-roundtrip repr; reports
here pin the representation to ``%.16e`` so identical runs produce
byte-identical files and parsed values round-trip exactly.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.16e" % x


def _emit(obj: Any, out: list[str], level: int, indent: int) -> None:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.append(pad + json.dumps(str(key)) + ": ")
            _emit(value, out, level + 1, indent)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(close_pad + "}")
    elif isinstance(obj, (list, tuple)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(items):
            out.append(pad)
            _emit(value, out, level + 1, indent)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(close_pad + "]")
    else:
        raise TypeError(f"cannot serialize object of type {type(obj)}")


def dumps(obj: Any, indent: int = 2) -> str:
    out: list[str] = []
    _emit(obj, out, 0, indent)
    return "".join(out)


def loads(text: str) -> Any:
    # json.loads accepts the Infinity / NaN literals emitted above
    return json.loads(text)


def complex_matrix_to_json(mat: np.ndarray) -> list:
    """Nested-array encoding: entry (i, j) becomes [re, im]."""
    mat = np.asarray(mat, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


def complex_matrix_from_json(data: list) -> np.ndarray:
    rows = [[complex(entry[0], entry[1]) for entry in row] for row in data]
    return np.asarray(rows, dtype=complex)
