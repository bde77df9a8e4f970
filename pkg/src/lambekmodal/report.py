"""Structured pass/fail results shared by every checker."""

from __future__ import annotations

import os

from dataclasses import dataclass
from typing import Any, Iterable, NamedTuple


class Violation(NamedTuple):
    condition: str
    witness: tuple


@dataclass(frozen=True)
class CheckReport:
    """Outcome of an exhaustive check.

    ``passed`` is derived from ``violations``; ``notes`` carries
    informational remarks that do not affect the verdict.
    """

    violations: tuple[Violation, ...] = ()
    notes: tuple[str, ...] = ()
    name: str = ""

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    @classmethod
    def build(cls, violations: Iterable[tuple[str, tuple]] = (), notes: Iterable[str] = (),
              name: str = "") -> "CheckReport":
        return cls(tuple(Violation(c, tuple(w)) for c, w in violations), tuple(notes), name)

    def merged(self, *others: "CheckReport", name: str | None = None) -> "CheckReport":
        vs = list(self.violations)
        ns = list(self.notes)
        for o in others:
            vs.extend(o.violations)
            ns.extend(o.notes)
        return CheckReport(tuple(vs), tuple(ns), self.name if name is None else name)

    def failed_conditions(self) -> set[str]:
        return {v.condition for v in self.violations}

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "passed": self.passed,
            "violations": [{"condition": v.condition, "witness": list(v.witness)}
                           for v in self.violations],
        }
        if self.name:
            doc["name"] = self.name
        if self.notes:
            doc["notes"] = list(self.notes)
        return doc


class _Collector:
    """Accumulates violations, keeping at most ``limit`` witnesses per condition."""

    def __init__(self, limit: int | None = None):
        self.limit = limit
        self.items: list[tuple[str, tuple]] = []
        self.counts: dict[str, int] = {}
        self.notes: list[str] = []

    def add(self, condition: str, *witness: Any) -> None:
        k = self.counts.get(condition, 0)
        self.counts[condition] = k + 1
        if self.limit is None or k < self.limit:
            self.items.append((condition, witness))

    def note(self, text: str) -> None:
        self.notes.append(text)

    def report(self, name: str = "") -> CheckReport:
        return CheckReport.build(self.items, self.notes, name)


__all__ = ["BudgetExceeded", "CheckReport", "PreconditionError", "Violation", "default_budget"]


class BudgetExceeded(RuntimeError):
    """Raised when an exhaustive check would exceed its resource bound."""

    def __init__(self, message: str, progress: dict[str, Any] | None = None):
        super().__init__(message)
        self.progress = dict(progress or {})


class PreconditionError(ValueError):
    """An operation was called on input that fails its documented precondition."""

    def __init__(self, message: str, report: CheckReport | None = None):
        super().__init__(message)
        self.report = report


DEFAULT_BUDGET = 2_000_000


def default_budget() -> int:
    """Budget for exhaustive loops; the WORKBENCH_BUDGET environment variable overrides it."""
    raw = os.environ.get("WORKBENCH_BUDGET")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"WORKBENCH_BUDGET must be an integer, got {raw!r}") from None
        if value <= 0:
            raise ValueError("WORKBENCH_BUDGET must be positive")
        return value
    return DEFAULT_BUDGET
