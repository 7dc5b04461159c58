"""Property reports: per-property trial counts and counterexamples, serialised as JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from ..heap import FREED
from ..printer import show_expr
from ..syntax import Expr
from ..values import value_to_json

MAX_FAILURES = 5


def render(x: Any) -> Any:
    """JSON-friendly rendering of values, expressions and containers."""
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if x is FREED:
        return "FREED"
    if isinstance(x, Expr):
        return show_expr(x)
    if isinstance(x, dict):
        return {str(k): render(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)) and not _is_value_tuple(x):
        return [render(v) for v in x]
    try:
        return value_to_json(x)
    except Exception:
        return repr(x)


def _is_value_tuple(x) -> bool:
    return False


@dataclass
class PropertyResult:
    suite: str
    property: str
    trials: int = 0
    failures: list = field(default_factory=list)
    failed: int = 0
    skipped: int = 0

    def ok(self, n: int = 1) -> None:
        self.trials += n

    def fail(self, seed, input, expected, got) -> None:
        self.trials += 1
        self.failed += 1
        if len(self.failures) < MAX_FAILURES:
            self.failures.append({"seed": render(seed), "input": render(input),
                                  "expected": render(expected), "got": render(got)})

    def check(self, cond: bool, seed, input, expected, got=None) -> bool:
        if cond:
            self.ok()
        else:
            self.fail(seed, input, expected, got)
        return cond

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        return {"suite": self.suite, "property": self.property, "trials": self.trials,
                "failed": self.failed, "skipped": self.skipped, "failures": self.failures}


class Report:
    """Ordered collection of property results for one or more suites."""

    def __init__(self, suite: str):
        self.suite = suite
        self._props: dict[str, PropertyResult] = {}
        self.notes: dict = {}

    def __getitem__(self, name: str) -> PropertyResult:
        if name not in self._props:
            self._props[name] = PropertyResult(self.suite, name)
        return self._props[name]

    def __iter__(self):
        return iter(self._props.values())

    def merge(self, other: "Report") -> "Report":
        for p in other:
            self._props[f"{p.suite}/{p.property}" if p.suite != self.suite else p.property] = p
        self.notes.update(other.notes)
        return self

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self)

    def failed_properties(self) -> list[str]:
        return [f"{p.suite}/{p.property}" for p in self if not p.passed]

    def to_json(self) -> list:
        return [p.to_json() for p in self]

    def dumps(self) -> str:
        return json.dumps({"results": self.to_json(), "notes": render(self.notes)},
                          sort_keys=True, indent=2)

    def summary(self) -> str:
        lines = []
        for p in self:
            mark = "ok  " if p.passed else "FAIL"
            extra = f", {p.skipped} skipped" if p.skipped else ""
            lines.append(f"{mark} {p.suite}/{p.property}: {p.trials - p.failed}/{p.trials}{extra}")
        return "\n".join(lines)
