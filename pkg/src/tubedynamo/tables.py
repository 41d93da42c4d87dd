"""Result tables and their deterministic CSV / JSON renderings.

Floats are formatted with 17 significant digits so identical configurations
produce byte-identical output. Complex quantities are carried as re/im column
pairs upstream; the table itself holds only reals (NaN included).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

__all__ = ["ResultTable", "render_csv", "render_json", "format_float"]


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


@dataclass
class ResultTable:
    columns: tuple[str, ...]
    rows: list[tuple[float, ...]]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(
                    f"row of length {len(row)} does not match {len(self.columns)} columns"
                )

    def column(self, name: str) -> list[float]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def _flatten_metadata(meta: Mapping[str, Any], prefix: str = "") -> list[tuple[str, str]]:
    items: list[tuple[str, str]] = []
    for key in sorted(meta):
        value = meta[key]
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            items.extend(_flatten_metadata(value, prefix=f"{name}."))
        elif isinstance(value, float):
            items.append((name, format_float(value)))
        elif isinstance(value, (list, tuple)):
            items.append((name, " ".join(str(v) for v in value)))
        else:
            items.append((name, str(value)))
    return items


def render_csv(table: ResultTable) -> str:
    """CSV with '#'-prefixed metadata lines, a header row, '.' decimals and
    comma separators; rows in grid order."""
    lines = [f"# {k}: {v}" for k, v in _flatten_metadata(table.metadata)]
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(format_float(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(table: ResultTable) -> str:
    """JSON object with a metadata block (including the column order) and an
    array of row objects."""
    payload = {
        "metadata": {**_json_safe(table.metadata), "columns": list(table.columns)},
        "rows": [
            {name: _json_value(v) for name, v in zip(table.columns, row)}
            for row in table.rows
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _json_value(v: float):
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _json_safe(obj):
    if isinstance(obj, Mapping):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, float):
        return _json_value(obj)
    return obj
