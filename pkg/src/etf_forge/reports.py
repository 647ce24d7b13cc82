"""JSON report envelopes shared by the CLI commands."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any

import numpy as np

from . import __version__
from .cyclotomic import Cyclotomic

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ASSERTION = 2
EXIT_BUDGET = 3

_AUTO = object()


def jsonable(v: Any):
    if isinstance(v, bool) or v is None or isinstance(v, (str, float)):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, Cyclotomic):
        return v.to_json()
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (set, frozenset)):
        return sorted(jsonable(x) for x in v)
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if hasattr(v, "to_json"):
        return v.to_json()
    raise TypeError(f"cannot serialize {type(v).__name__}")


@dataclass
class Report:
    command: str
    inputs: dict
    results: list = field(default_factory=list)
    work: Counter = field(default_factory=Counter)
    data: dict = field(default_factory=dict)
    budget_report: dict | None = None
    rejected: bool = False

    def add(self, check: str, value, expected=None, passed=_AUTO, note: str | None = None) -> bool | None:
        """Record a result; ``passed`` defaults to value == expected, or None without an expectation."""
        if passed is _AUTO:
            passed = None if expected is None else value == expected
        entry = {"check": check, "passed": passed, "value": jsonable(value), "expected": jsonable(expected)}
        if note:
            entry["note"] = note
        self.results.append(entry)
        return passed

    def count(self, name: str, amount: int) -> None:
        self.work[name] += int(amount)

    @property
    def failed(self) -> bool:
        return any(r["passed"] is False for r in self.results)

    @property
    def exit_code(self) -> int:
        if self.failed:
            return EXIT_ASSERTION
        if self.budget_report is not None:
            return EXIT_BUDGET
        if self.rejected:
            return EXIT_USAGE
        return EXIT_OK

    @property
    def status(self) -> str:
        return {
            EXIT_OK: "ok",
            EXIT_USAGE: "rejected",
            EXIT_ASSERTION: "assertion_failed",
            EXIT_BUDGET: "budget_exceeded",
        }[self.exit_code]

    def to_json(self, wall_seconds: float | None = None) -> dict:
        timing: dict = {"work": dict(sorted(self.work.items()))}
        if wall_seconds is not None:
            timing["wall_seconds"] = round(wall_seconds, 3)
        out = {
            "tool_version": __version__,
            "command": self.command,
            "inputs": jsonable(self.inputs),
            "results": self.results,
            "timing": timing,
            "status": self.status,
            "exit_code": self.exit_code,
        }
        if self.data:
            out["data"] = jsonable(self.data)
        if self.budget_report is not None:
            out["budget_report"] = jsonable(self.budget_report)
        return out

    def dumps(self, wall_seconds: float | None = None) -> str:
        return json.dumps(self.to_json(wall_seconds), sort_keys=True, indent=2)


def report_schema() -> dict:
    text = resources.files("etf_forge").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)
