"""JSON emission with full-precision floats.

Floats are written with 17 significant digits so every float64 round-trips
bit-exactly through the text form.  Non-finite values are not representable in
JSON; callers map them to null before serializing (log10 of an exactly-zero
loss is the one place this happens).
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(
            f"non-finite float {x!r} cannot be serialized; map it to None first"
        )
    s = format(x, ".17g")
    # Make sure the token still parses as a JSON number (it always does for
    # finite doubles, including exponents).
    return s


def dumps17(obj: Any, indent: int = 2) -> str:
    """Serialize nested dict/list/scalar data with 17-digit floats."""
    return "".join(_emit(obj, indent, 0)) + "\n"


def _emit(obj: Any, indent: int, level: int):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        yield "null"
    elif obj is True:
        yield "true"
    elif obj is False:
        yield "false"
    elif isinstance(obj, (int, np.integer)):
        yield str(int(obj))
    elif isinstance(obj, (float, np.floating)):
        yield _fmt_float(float(obj))
    elif isinstance(obj, str):
        yield _json_string(obj)
    elif isinstance(obj, np.ndarray):
        yield from _emit(obj.tolist(), indent, level)
    elif isinstance(obj, dict):
        if not obj:
            yield "{}"
            return
        yield "{\n"
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            yield pad_in + _json_string(str(k)) + ": "
            yield from _emit(v, indent, level + 1)
            yield ",\n" if i < len(items) - 1 else "\n"
        yield pad + "}"
    elif isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            yield "[]"
            return
        scalar = all(
            isinstance(v, (int, float, np.integer, np.floating)) for v in seq
        )
        if scalar:
            yield "[" + ", ".join(
                str(int(v)) if isinstance(v, (int, np.integer)) else _fmt_float(float(v))
                for v in seq
            ) + "]"
            return
        yield "[\n"
        for i, v in enumerate(seq):
            yield pad_in
            yield from _emit(v, indent, level + 1)
            yield ",\n" if i < len(seq) - 1 else "\n"
        yield pad + "]"
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


_ESCAPES = {
    "\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t",
    "\b": "\\b", "\f": "\\f",
}


def _json_string(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def log10_or_none(x: float) -> float | None:
    """log10 for report fields; exactly-zero losses map to null."""
    if x is None or x <= 0.0 or not math.isfinite(x):
        return None
    return math.log10(x)
