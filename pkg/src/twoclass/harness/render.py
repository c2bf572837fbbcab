"""JSON and plain-table rendering of results.

JSON output is sorted and uses decimal strings for every integer that carries
mathematical content, so it is stable across runs and safe for big values.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from fractions import Fraction

from ..unit_lattice import FieldElement, MultiQuadField, Unit, UnitSymbol
from .scans import LemmaReport

FORMATS = ("json", "table")


def to_jsonable(obj):
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (FieldElement, Unit, UnitSymbol)):
        return str(obj)
    if isinstance(obj, MultiQuadField):
        return [str(g) for g in obj.gens]
    if isinstance(obj, enum.Enum):
        return obj.name
    if isinstance(obj, str):
        return obj
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    return str(obj)


def _table_report(r: LemmaReport) -> str:
    rows = [("check", "tested", "passed", "failed")]
    for name in sorted(r.breakdown):
        t, p = r.breakdown[name]
        rows.append((name, str(t), str(p), str(t - p)))
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    if r.tested or r.unknown:
        lines.append(f"{r.lemma_id} bound={r.bound}: {r.passed}/{r.tested} passed, "
                     f"{r.unknown} unknown, {r.wall_time:.2f}s")
    for f in r.failures:
        lines.append(f"FAIL {f.check} input={f.input} expected={f.expected} got={f.got}")
    return "\n".join(lines)


def _table_generic(data) -> str:
    if not isinstance(data, dict):
        return json.dumps(data)
    rows = [(str(k), v if isinstance(v, str) else json.dumps(v, sort_keys=True)) for k, v in data.items()]
    w = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(w)}  {v}" for k, v in rows)


def report_render(obj, fmt: str = "table") -> str:
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    if fmt == "json":
        return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)
    if isinstance(obj, LemmaReport):
        return _table_report(obj)
    return _table_generic(to_jsonable(obj))
