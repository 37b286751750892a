"""JSON and CSV encodings for rationals, expansions, grids and traces.

Rationals are written as ``"p/q"`` strings; records that are meant for
plotting also carry a 17-significant-digit decimal.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any, Iterable

from .dyadic import DyadicCube
from .haar import HaarExpansion

__all__ = [
    "rational_to_str",
    "rational_from_str",
    "decimal",
    "expansion_to_dict",
    "expansion_from_dict",
    "dumps_expansion",
    "loads_expansion",
    "grid_to_dict",
    "grid_from_dict",
    "step_to_dict",
    "trace_to_jsonl",
    "trace_to_csv",
    "dumps",
]


def rational_to_str(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def rational_from_str(text: str | int) -> Fraction:
    if isinstance(text, float):
        raise TypeError("floats are not accepted as exact values")
    return Fraction(text)


def decimal(x: Fraction | int) -> str:
    return f"{float(x):.17g}"


def expansion_to_dict(f: HaarExpansion) -> dict[str, Any]:
    items = sorted(f.coeffs.items(), key=lambda kv: (kv[0][0].key, kv[0][1]))
    return {
        "dim": f.dim,
        "constant": rational_to_str(f.constant),
        "coeffs": [{"cube": str(c), "j": j, "value": rational_to_str(v)} for (c, j), v in items],
    }


def expansion_from_dict(data: dict[str, Any]) -> HaarExpansion:
    try:
        dim = int(data["dim"])
        coeffs = {
            (DyadicCube.parse(item["cube"]), int(item["j"])): rational_from_str(item["value"])
            for item in data.get("coeffs", [])
        }
        return HaarExpansion(dim, rational_from_str(data.get("constant", 0)), coeffs)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed expansion record: {exc}") from exc


def dumps(obj: Any) -> str:
    """Deterministic compact JSON."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def dumps_expansion(f: HaarExpansion) -> str:
    return dumps(expansion_to_dict(f))


def loads_expansion(text: str) -> HaarExpansion:
    return expansion_from_dict(json.loads(text))


def grid_to_dict(values: Iterable[Fraction], dim: int, level: int) -> dict[str, Any]:
    return {"dim": dim, "level": level, "values": [rational_to_str(v) for v in values]}


def grid_from_dict(data: dict[str, Any]) -> tuple[list[Fraction], int, int]:
    dim, level = int(data["dim"]), int(data["level"])
    values = [rational_from_str(v) for v in data["values"]]
    if len(values) != 1 << (dim * level):
        raise ValueError(f"grid has {len(values)} values, expected {1 << (dim * level)}")
    return values, dim, level


def step_to_dict(record, initial_norm: Fraction) -> dict[str, Any]:
    ratio = record.approximant_norm / initial_norm if initial_norm else None
    return {
        "m": record.m,
        "delta_m": str(record.delta_m),
        "j_m": record.j_m,
        "tilde_delta_m": str(record.tilde_delta_m),
        "i_m": record.i_m,
        "removed_value": rational_to_str(record.removed_value),
        "approximant_norm": rational_to_str(record.approximant_norm),
        "approximant_norm_decimal": decimal(record.approximant_norm),
        "residual_norm": rational_to_str(record.residual_norm),
        "residual_norm_decimal": decimal(record.residual_norm),
        "ratio": None if ratio is None else rational_to_str(ratio),
        "ratio_decimal": None if ratio is None else decimal(ratio),
    }


def trace_to_jsonl(trace) -> str:
    base = trace.initial_norm
    return "".join(dumps(step_to_dict(r, base)) + "\n" for r in trace.steps)


def trace_to_csv(trace) -> str:
    base = trace.initial_norm
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "residual_norm", "approximant_norm", "ratio"])
    for r in trace.steps:
        ratio = decimal(r.approximant_norm / base) if base else ""
        writer.writerow([r.m, decimal(r.residual_norm), decimal(r.approximant_norm), ratio])
    return buf.getvalue()
