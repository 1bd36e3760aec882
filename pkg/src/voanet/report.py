"""Report serialization: deterministic JSON and CSV.

Exact scalars are written as strings by the suites themselves; this module
only guarantees that floats carry 17 significant digits and that key order
and layout are stable, so identical runs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

import numpy as np

from .scalar import Scalar, format_scalar

SCHEMA_VERSION = 1


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        # JSON has no literal for these; keep them visible as strings
        return json.dumps(repr(x))
    text = format(x, ".17g")
    return text if ("." in text or "e" in text) else text + ".0"


def _encode(obj, indent: int, depth: int, out: list):
    pad = " " * (indent * (depth + 1))
    end_pad = " " * (indent * depth)
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, (Fraction, Scalar)):
        out.append(json.dumps(format_scalar(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.append(pad + json.dumps(str(k), ensure_ascii=False) + ": ")
            _encode(v, indent, depth + 1, out)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(end_pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            out.append("[")
            for i, v in enumerate(seq):
                if i:
                    out.append(", ")
                _encode(v, indent, depth + 1, out)
            out.append("]")
            return
        out.append("[\n")
        for i, v in enumerate(seq):
            out.append(pad)
            _encode(v, indent, depth + 1, out)
            out.append(",\n" if i + 1 < len(seq) else "\n")
        out.append(end_pad + "]")
    elif isinstance(obj, complex):
        raise TypeError("complex floats must be split into re/im before serialization")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    out = []
    _encode(obj, indent, 0, out)
    return "".join(out) + "\n"


def csv_rows(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()
