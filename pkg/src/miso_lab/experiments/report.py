"""Check records and their JSON/CSV rendering."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Record:
    check: str
    anchor: str
    value: object
    expected: object
    tolerance: float | None
    passed: bool

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "anchor": self.anchor,
            "value": _plain(self.value),
            "expected": _plain(self.expected),
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
        }


def _plain(v):
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, complex):
        v = v.real if v.imag == 0 else str(v)
    try:
        x = float(v)
    except (TypeError, ValueError):
        return str(v)
    return x if math.isfinite(x) else str(x)


@dataclass
class Report:
    suite: str
    records: list
    table: list = field(default_factory=list)

    @property
    def summary(self) -> dict:
        passed = sum(r.passed for r in self.records)
        return {"total": len(self.records), "passed": passed, "failed": len(self.records) - passed}

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.records)

    def to_json(self) -> str:
        doc = {
            "suite": self.suite,
            "records": [r.as_dict() for r in self.records],
            "summary": self.summary,
        }
        if self.table:
            doc["table"] = [{k: _plain(v) for k, v in row.items()} for row in self.table]
        return json.dumps(doc, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.table:
            cols = list(self.table[0])
            w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for row in self.table:
                w.writerow({k: _plain(v) for k, v in row.items()})
        else:
            cols = ["check", "anchor", "value", "expected", "tolerance", "pass"]
            w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for r in self.records:
                w.writerow(r.as_dict())
        return buf.getvalue()


def run_checks(checks, workers: int = 4) -> list:
    """Evaluate zero-argument record factories concurrently, keeping declaration order."""
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda fn: fn(), checks))
