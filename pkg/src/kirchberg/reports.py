"""Verification reports and their text and structured renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA = "kirchberg-report/1"


@dataclass
class Report:
    """Outcome of a verification: named checks plus free-form details."""

    name: str
    checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def check(self, key: str, ok: bool, why: str = "") -> bool:
        self.checks[key] = bool(ok) and self.checks.get(key, True)
        if not ok:
            self.failures.append(f"{key}: {why}" if why else key)
        return ok

    def merge(self, other: "Report", prefix: str = "") -> None:
        for k, v in other.checks.items():
            key = f"{prefix}{k}"
            self.checks[key] = v and self.checks.get(key, True)
        self.failures += [f"{prefix}{f}" for f in other.failures]
        if other.details:
            self.details[prefix.rstrip(": ") or other.name] = other.details

    @property
    def ok(self) -> bool:
        return all(self.checks.values()) and not self.failures

    def to_data(self) -> dict:
        return {"name": self.name, "ok": self.ok, "checks": self.checks,
                "details": self.details, "failures": self.failures}


def structured(payload: dict) -> str:
    """Stable JSON with the schema tag first."""
    return json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=False, default=str) + "\n"


def text(report: Report, max_failures: int = 20) -> str:
    lines = [f"{report.name}: {'PASS' if report.ok else 'FAIL'}"]
    for k, v in report.checks.items():
        lines.append(f"  [{'ok' if v else '!!'}] {k}")
    for f in report.failures[:max_failures]:
        lines.append(f"  failure: {f}")
    if len(report.failures) > max_failures:
        lines.append(f"  ... {len(report.failures) - max_failures} more failures")
    for k, v in report.details.items():
        if isinstance(v, (dict, list)):
            v = json.dumps(v, default=str)
            if len(v) > 200:
                v = v[:197] + "..."
        lines.append(f"  {k}: {v}")
    return "\n".join(lines) + "\n"
