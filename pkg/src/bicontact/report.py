"""Deterministic machine-readable run reports.

A report is a plain JSON document with a fixed field order; every float is
rendered with 17 significant digits, so identical configuration + seed give
a byte-identical payload.  Every numeric entry is attached to a named
identity, invariant, or check so nothing in the file is anonymous.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import __version__
from .pipeline import InvariantRecord

__all__ = ["format_float", "dumps_canonical", "record_to_dict", "check",
           "summarize_residuals", "Report"]

TOOL_NAME = "bicontact"


def format_float(x: float) -> str:
    """Render one float with 17 significant digits (round-trip exact)."""
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(float(x), ".17g")


def _ser(obj, out, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            if not isinstance(k, str):
                raise TypeError(f"report keys must be strings, got {k!r}")
            out.append(pad_in + json.dumps(k) + ": ")
            _ser(v, out, indent, level + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad_in)
            _ser(v, out, indent, level + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def dumps_canonical(obj, indent: int = 2) -> str:
    """Serialize to JSON text with deterministic layout and float rendering."""
    out: list = []
    _ser(obj, out, indent, 0)
    return "".join(out)


_RECORD_FIELDS = ("point", "eps", "delta", "case", "klass", "C", "C1", "C2",
                  "C3", "C33", "C333", "A1", "A2", "A3", "B1", "B2", "B3",
                  "xi", "zeta", "zeta3", "rho", "W")


def record_to_dict(rec: InvariantRecord) -> dict:
    """Flatten one per-point record; residual keys are sorted."""
    row = {}
    for name in _RECORD_FIELDS:
        value = getattr(rec, name)
        row[name] = list(value) if isinstance(value, tuple) else value
    row["residuals"] = {k: rec.residuals[k] for k in sorted(rec.residuals)}
    return row


def check(name: str, value, tol=None, passed=None) -> dict:
    """One named pass/fail entry.  With a tolerance, pass = |value| <= tol."""
    if passed is None:
        if tol is None:
            raise ValueError("check needs either a tolerance or a verdict")
        passed = abs(value) <= tol
    entry = {"name": name, "value": value}
    if tol is not None:
        entry["tol"] = tol
    entry["passed"] = bool(passed)
    return entry


def summarize_residuals(rows) -> dict:
    """max / mean / count per residual name over an iterable of dicts."""
    acc: dict = {}
    for row in rows:
        for name, value in row.items():
            value = abs(float(value))
            slot = acc.setdefault(name, [0.0, 0.0, 0])
            slot[0] = max(slot[0], value)
            slot[1] += value
            slot[2] += 1
    return {name: {"max": mx, "mean": total / n, "count": n}
            for name, (mx, total, n) in sorted(acc.items())}


@dataclass
class Report:
    """Everything one CLI run produced, ready to serialize."""

    command: str
    config: dict
    records: list = field(default_factory=list)     # per-point rows
    summary: dict = field(default_factory=dict)     # residual name -> stats
    histogram: dict = field(default_factory=dict)   # case/class tag -> count
    checks: list = field(default_factory=list)      # entries from check()
    errors: list = field(default_factory=list)      # structured failures

    @property
    def passed(self) -> bool:
        return not self.errors and all(c["passed"] for c in self.checks)

    def add_error(self, stage: str, exc: BaseException):
        self.errors.append({"stage": stage, "type": type(exc).__name__,
                            "message": str(exc)})

    def to_dict(self) -> dict:
        return {
            "tool": TOOL_NAME,
            "version": __version__,
            "command": self.command,
            "config": self.config,
            "records": self.records,
            "summary": self.summary,
            "histogram": {k: self.histogram[k] for k in sorted(self.histogram)},
            "checks": self.checks,
            "errors": self.errors,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return dumps_canonical(self.to_dict()) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
