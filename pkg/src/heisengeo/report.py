"""Deterministic serialization: sorted keys, 17 significant digits, no wall time."""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def _fmt_float(x: float) -> str:
    return format(x, ".17g")


def normalize(obj):
    """Convert numpy containers and scalars to plain JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [normalize(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x + 0.0  # drops the sign of -0.0
    if hasattr(obj, "to_dict"):
        return normalize(obj.to_dict())
    return obj


def _encode(o, level, indent):
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if isinstance(o, dict):
        if not o:
            yield "{}"
            return
        items = sorted(o.items())
        yield "{"
        for i, (k, v) in enumerate(items):
            yield (sep if i else "") + pad + json.dumps(k) + ": "
            yield from _encode(v, level + 1, indent)
        yield end + "}"
    elif isinstance(o, list):
        if not o:
            yield "[]"
            return
        yield "["
        for i, v in enumerate(o):
            yield (sep if i else "") + pad
            yield from _encode(v, level + 1, indent)
        yield end + "]"
    elif isinstance(o, float):
        yield _fmt_float(o)
    else:
        yield json.dumps(o)


def dumps(obj, indent: int = 2) -> str:
    """JSON text with sorted keys and every float at 17 significant digits."""
    return "".join(_encode(normalize(obj), 0, indent)) + "\n"


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_text(path, text: str):
    """Write to ``path``; ``-`` or ``None`` means stdout."""
    if path in (None, "-"):
        import sys

        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
