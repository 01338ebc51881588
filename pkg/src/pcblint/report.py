"""Check reports and their JSON/text renderings.

JSON schema ``pcblint.report/1``::

    {
      "schema": "pcblint.report/1",
      "tool": "pcblint 0.1.0",
      "phase": "quick" | "full",
      "lab": "H3",
      "files": [{"name": ..., "kind": ..., "sha256": ...}],
      "netlist": {"nets": int, "pinrefs": int} | null,
      "findings": {
        "active": [finding], "waived": [finding], "proposed": [finding],
        "stale": [{"rule_id", "locator", "state", "reason"}]
      },
      "summary": {"errors", "warnings", "waived", "proposed", "stale"}
    }

where a finding is ``{"rule_id", "severity", "locator", "message", "waivable"}``.
Both renderings are pure functions of the report.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any, Optional

from . import __version__
from .netlist import Netlist
from .rules.engine import Finding, Phase, Severity
from .waivers import ReconciledReport

SCHEMA = "pcblint.report/1"


@dataclass(frozen=True)
class InputFile:
    name: str
    kind: str
    sha256: str

    @classmethod
    def of(cls, name: str, kind: str, data: bytes) -> "InputFile":
        return cls(name, kind, hashlib.sha256(data).hexdigest())


@dataclass(frozen=True)
class Report:
    phase: Phase
    lab: str
    files: tuple[InputFile, ...]
    findings: ReconciledReport
    net_count: Optional[int] = None
    pinref_count: Optional[int] = None
    tool: str = f"pcblint {__version__}"

    @property
    def errors(self) -> int:
        return sum(f.severity is Severity.ERROR for f in self.findings.active)

    @property
    def warnings(self) -> int:
        return sum(f.severity is Severity.WARNING for f in self.findings.active)

    def summary(self) -> dict[str, int]:
        r = self.findings
        return {
            "errors": self.errors,
            "warnings": self.warnings,
            "waived": len(r.waived),
            "proposed": len(r.proposed),
            "stale": len(r.stale),
        }

    def to_dict(self) -> dict[str, Any]:
        r = self.findings
        return {
            "schema": SCHEMA,
            "tool": self.tool,
            "phase": self.phase.value,
            "lab": self.lab,
            "files": [{"name": f.name, "kind": f.kind, "sha256": f.sha256} for f in self.files],
            "netlist": None
            if self.net_count is None
            else {"nets": self.net_count, "pinrefs": self.pinref_count},
            "findings": {
                "active": [f.to_dict() for f in r.active],
                "waived": [f.to_dict() for f in r.waived],
                "proposed": [f.to_dict() for f in r.proposed],
                "stale": [
                    {
                        "rule_id": s.waiver.rule_id,
                        "locator": s.waiver.locator,
                        "state": s.waiver.state.value,
                        "reason": s.reason,
                    }
                    for s in r.stale
                ],
            },
            "summary": self.summary(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        r = self.findings
        lines = [f"{self.tool}  {self.phase.value} check  lab {self.lab}"]
        lines += [f"file {f.name} {f.kind} sha256:{f.sha256}" for f in self.files]
        if self.net_count is not None:
            lines.append(f"netlist: {self.net_count} nets, {self.pinref_count} pinrefs")
        for title, group in (("active", r.active), ("waived", r.waived), ("proposed", r.proposed)):
            if group:
                lines.append(f"{title}:")
                lines += [_finding_line(f) for f in group]
        if r.stale:
            lines.append("stale waivers:")
            lines += [
                f"  {s.waiver.rule_id}  {s.waiver.locator}  [{s.waiver.state.value}] {s.reason}"
                for s in r.stale
            ]
        s = self.summary()
        lines.append(
            "summary: "
            + ", ".join(
                _plural(s[k], k)
                for k in ("errors", "warnings")
            )
            + f", {s['waived']} waived, {s['proposed']} proposed, {s['stale']} stale"
        )
        return "\n".join(lines) + "\n"


def _plural(n: int, word: str) -> str:
    return f"{n} {word if n != 1 else word[:-1]}"


def _finding_line(f: Finding) -> str:
    flag = "" if f.waivable else " (not waivable)"
    return f"  {f.severity.value:<7}  {f.rule_id}  {f.locator}  {f.message}{flag}"


def netlist_stats(nl: Optional[Netlist]) -> tuple[Optional[int], Optional[int]]:
    if nl is None:
        return None, None
    return len(nl.nets), nl.pinref_count
