"""Machine-readable pass/fail records shared by every checker."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
RESOURCE_LIMIT = "resource-limit"


class ResourceLimitError(RuntimeError):
    """A configured enumeration bound was exceeded; never a silent truncation."""


class MalformedInputError(ValueError):
    """Input data violates the declared schema (dangling ids, bad tables)."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    witness: dict = field(default_factory=dict)
    anchor: str = ""

    def __post_init__(self):
        if self.status not in (PASS, FAIL, RESOURCE_LIMIT):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAIL and not self.witness:
            raise ValueError(f"fail result {self.name!r} must carry a witness")


@dataclass
class VerificationReport:
    """Ordered list of check results for one suite.

    Checks are kept in insertion order; serialisation is deterministic so
    two runs on identical inputs produce identical bytes.
    """

    suite: str
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, name: str, ok: bool, witness: dict | None = None, anchor: str = "") -> None:
        status = PASS if ok else FAIL
        self.checks.append(CheckResult(name, status, dict(witness or {}), anchor))

    def add_limit(self, name: str, witness: dict | None = None, anchor: str = "") -> None:
        self.checks.append(CheckResult(name, RESOURCE_LIMIT, dict(witness or {}), anchor))

    def merge(self, other: "VerificationReport", prefix: str = "") -> None:
        for c in other.checks:
            name = f"{prefix}{c.name}" if prefix else c.name
            self.checks.append(CheckResult(name, c.status, c.witness, c.anchor))

    @property
    def passed(self) -> bool:
        return all(c.status == PASS for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == FAIL]

    def first_failure(self) -> CheckResult | None:
        fails = self.failures
        return fails[0] if fails else None

    def to_dict(self) -> dict:
        return {
            "schema": "corrkit-report/1",
            "suite": self.suite,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "status": c.status,
                    "witness": _stable(c.witness),
                    "anchor": c.anchor,
                }
                for c in self.checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"suite: {self.suite}"]
        for c in self.checks:
            tag = {PASS: "PASS", FAIL: "FAIL", RESOURCE_LIMIT: "LIMIT"}[c.status]
            line = f"  [{tag}] {c.name}"
            if c.anchor:
                line += f"  ({c.anchor})"
            if c.witness:
                line += f"  witness={_stable(c.witness)!r}"
            lines.append(line)
        lines.append(f"result: {'all pass' if self.passed else 'FAILURES PRESENT'}")
        return "\n".join(lines)


def _stable(value):
    """Coerce witness payloads to JSON-friendly, deterministic structures."""
    if isinstance(value, dict):
        return {str(k): _stable(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, (list, tuple)):
        return [_stable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(str(v) for v in value)
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)
