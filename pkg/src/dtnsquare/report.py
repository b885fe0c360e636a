"""Machine-readable verification reports.

JSON layout, in this key order::

    {"command": str, "parameters": {...}, "results": [{"name", "value",
     "tolerance", "pass"}, ...], "precision_bits": int, "wall_time_ms": int}

Floats are written in scientific notation with the fewest significant digits
that reproduce the double exactly on re-parsing.  Non-finite or missing values
are written as ``null`` and never count as passing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


class RawNumber(str):
    """Pre-formatted numeric literal emitted verbatim into JSON."""


@dataclass
class Result:
    name: str
    value: float | None
    tolerance: float
    passed: bool = field(default=None)

    def __post_init__(self):
        if self.value is not None:
            self.value = float(self.value)
            if not math.isfinite(self.value):
                self.value = None
        self.tolerance = float(self.tolerance)
        consistent = self.value is not None and abs(self.value) <= self.tolerance
        if self.passed is None:
            self.passed = consistent
        elif self.passed and not consistent:
            raise ValueError(f"result {self.name!r} marked as passing but exceeds its tolerance")


@dataclass
class Report:
    command: str
    parameters: dict
    results: list[Result]
    precision_bits: int
    wall_time_ms: int = 0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": dict(self.parameters),
            "results": [
                {"name": r.name, "value": r.value, "tolerance": r.tolerance, "pass": r.passed}
                for r in self.results
            ],
            "precision_bits": self.precision_bits,
            "wall_time_ms": self.wall_time_ms,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict()) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        results = [
            Result(r["name"], r["value"], r["tolerance"], r["pass"]) for r in data["results"]
        ]
        return cls(
            data["command"],
            data["parameters"],
            results,
            data["precision_bits"],
            data["wall_time_ms"],
        )


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return np.format_float_scientific(x, unique=True, trim="0")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats in fixed scientific format and keys in insertion order."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, RawNumber):
        return str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, RawNumber)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")
