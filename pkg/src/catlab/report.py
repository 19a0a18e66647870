"""Check records, the run report and byte-stable serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path


def format_float(x) -> str:
    """Shortest decimal that round-trips, as produced by ``repr``."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _plain(value):
    """Convert numpy scalars, tuples and non-finite floats to JSON-safe values."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if type(value).__name__ == "bool_":
        return bool(value)
    if isinstance(value, int) or (hasattr(value, "__index__") and not isinstance(value, float)):
        return int(value)
    if isinstance(value, float) or hasattr(value, "__float__"):
        x = float(value)
        return x if math.isfinite(x) else format_float(x)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return str(value)


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_float(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def write_table(path: Path, columns, rows, fmt="csv") -> Path:
    """Write rows as CSV or as a JSON list of records; returns the written path."""
    path = Path(path)
    if fmt == "json":
        path = path.with_suffix(".json")
        records = [dict(zip(columns, (float(v) for v in row))) for row in rows]
        path.write_text(dumps({"columns": list(columns), "rows": records}))
    else:
        path = path.with_suffix(".csv")
        path.write_text(csv_text(columns, rows))
    return path


@dataclass
class Check:
    id: str
    paper_anchor: str
    value: object
    bound: object
    passed: bool
    detail: dict = field(default_factory=dict)

    def as_dict(self):
        out = {
            "id": self.id,
            "paper_anchor": self.paper_anchor,
            "value": self.value,
            "bound": self.bound,
            "pass": bool(self.passed),
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, check: Check):
        self.checks.append(check)
        return check

    @property
    def summary(self):
        passed = sum(1 for c in self.checks if c.passed)
        return {"total": len(self.checks), "passed": passed, "failed": len(self.checks) - passed}

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {"checks": [c.as_dict() for c in self.checks], "summary": self.summary}

    def to_json(self) -> str:
        return dumps(self.as_dict())

    def lines(self):
        out = []
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            out.append(f"{flag} {c.id}: value={_show(c.value)} bound={_show(c.bound)}  [{c.paper_anchor}]")
        s = self.summary
        out.append(f"{s['passed']}/{s['total']} checks passed")
        return out


def _show(v):
    if isinstance(v, float):
        return format_float(v)
    return str(v)
