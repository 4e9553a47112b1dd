"""Canonical JSON and DOT output."""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from pathlib import Path

from .metric import FinMetric


def _default(obj):
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(data) -> str:
    """Sorted keys, fixed separators: equal values give byte-identical text."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=_default)


def read_json(path: str | Path):
    if str(path) == "-":
        import sys

        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def space_to_dot(M: FinMetric, name: str = "space") -> str:
    """Complete graph with every edge labelled by its distance."""
    lines = [f"graph {name} {{"]
    for p in M.points:
        lines.append(f"  {json.dumps(p)};")
    for i, j in itertools.combinations(range(len(M)), 2):
        a, b = json.dumps(M.points[i]), json.dumps(M.points[j])
        lines.append(f'  {a} -- {b} [label="{_fmt(M.di(i, j))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
