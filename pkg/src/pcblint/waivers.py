"""Student explanations for findings, and staff review of them.

Waiver file format (UTF-8, one record per line)::

    # comment
    rule_id | locator | state | explanation | reviewer_note

``state`` is ``proposed``, ``approved`` or ``rejected``. A literal ``|``
inside a field is written ``\\|``, a backslash ``\\\\``, a newline
``\\n`` and a carriage return ``\\r``. Blank lines and lines starting
with ``#`` are ignored.
"""

from __future__ import annotations

import enum
import os
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Union

from .rules.engine import Finding


class WaiverError(Exception):
    pass


class WaiverSyntax(WaiverError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateWaiver(WaiverError):
    pass


class NoSuchWaiver(WaiverError):
    pass


class AlreadyDecided(WaiverError):
    pass


class WaiverState(str, enum.Enum):
    PROPOSED = "proposed"
    APPROVED = "approved"
    REJECTED = "rejected"


@dataclass(frozen=True)
class Waiver:
    rule_id: str
    locator: str
    explanation: str
    state: WaiverState = WaiverState.PROPOSED
    reviewer_note: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.explanation.strip():
            raise ValueError("a waiver needs an explanation")

    @property
    def key(self) -> tuple[str, str]:
        return (self.rule_id, self.locator)


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("|", "\\|").replace("\n", "\\n").replace("\r", "\\r")


def _split(line: str, lineno: int) -> list[str]:
    fields, buf = [], []
    i = 0
    while i < len(line):
        ch = line[i]
        if ch == "\\":
            if i + 1 >= len(line):
                raise WaiverSyntax(lineno, "dangling backslash")
            nxt = line[i + 1]
            if nxt not in "\\|nr":
                raise WaiverSyntax(lineno, f"unknown escape \\{nxt}")
            buf.append({"n": "\n", "r": "\r"}.get(nxt, nxt))
            i += 2
            continue
        if ch == "|":
            fields.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    fields.append("".join(buf))
    return [f.strip() for f in fields]


def load_waivers(data: Union[bytes, str]) -> list[Waiver]:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WaiverSyntax(0, f"not UTF-8: {exc}") from None
    out: list[Waiver] = []
    seen: set[tuple[str, str]] = set()
    for lineno, line in enumerate(data.split("\n"), start=1):
        line = line.removesuffix("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = _split(line, lineno)
        if len(fields) != 5:
            raise WaiverSyntax(lineno, f"expected 5 fields, found {len(fields)}")
        rule_id, loc, state, explanation, note = fields
        if not rule_id or not loc:
            raise WaiverSyntax(lineno, "rule id and locator are required")
        try:
            state_value = WaiverState(state.lower())
        except ValueError:
            raise WaiverSyntax(lineno, f"unknown state {state!r}") from None
        if not explanation:
            raise WaiverSyntax(lineno, "explanation is empty")
        waiver = Waiver(rule_id, loc, explanation, state_value, note or None)
        if waiver.key in seen:
            raise DuplicateWaiver(f"line {lineno}: second waiver for {rule_id} at {loc}")
        seen.add(waiver.key)
        out.append(waiver)
    return out


def dump_waivers(waivers: Iterable[Waiver]) -> str:
    lines = ["# rule_id | locator | state | explanation | reviewer_note"]
    for w in waivers:
        fields = [w.rule_id, w.locator, w.state.value, w.explanation, w.reviewer_note or ""]
        lines.append(" | ".join(_escape(f) for f in fields).rstrip())
    return "\n".join(lines) + "\n"


def write_atomic(path: Union[str, Path], text: str) -> None:
    """Write via a temporary file in the same directory, then rename over."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_waivers(path: Union[str, Path], waivers: Iterable[Waiver]) -> None:
    write_atomic(path, dump_waivers(waivers))


def propose(waivers: list[Waiver], rule_id: str, locator: str, explanation: str) -> list[Waiver]:
    """Add a student's explanation, or replace one that was rejected."""
    out = []
    replaced = False
    for w in waivers:
        if w.key == (rule_id, locator):
            if w.state is not WaiverState.REJECTED:
                raise DuplicateWaiver(f"{rule_id} at {locator} already has a {w.state.value} waiver")
            w = Waiver(rule_id, locator, explanation)
            replaced = True
        out.append(w)
    if not replaced:
        out.append(Waiver(rule_id, locator, explanation))
    return out


def review(
    waivers: list[Waiver],
    rule_id: str,
    locator: str,
    decision: WaiverState,
    note: Optional[str] = None,
) -> list[Waiver]:
    if decision is WaiverState.PROPOSED:
        raise ValueError("a review decision is approved or rejected")
    out = []
    found = False
    for w in waivers:
        if w.key == (rule_id, locator):
            found = True
            if w.state is not WaiverState.PROPOSED:
                raise AlreadyDecided(f"{rule_id} at {locator} is already {w.state.value}")
            w = replace(w, state=decision, reviewer_note=note or None)
        out.append(w)
    if not found:
        raise NoSuchWaiver(f"no waiver for {rule_id} at {locator}")
    return out


@dataclass(frozen=True)
class StaleWaiver:
    waiver: Waiver
    reason: str


@dataclass(frozen=True)
class ReconciledReport:
    active: tuple[Finding, ...]
    waived: tuple[Finding, ...]
    proposed: tuple[Finding, ...]
    stale: tuple[StaleWaiver, ...]

    @property
    def ready_for_review(self) -> bool:
        """Everything is either fixed or explained."""
        return not self.active


def _fkey(f: Finding) -> tuple[str, str]:
    return f.key


def reconcile(findings: Iterable[Finding], waivers: Iterable[Waiver]) -> ReconciledReport:
    by_key = {w.key: w for w in waivers}
    active, waived, proposed, stale = [], [], [], []
    matched = set()
    for f in sorted(set(findings), key=_fkey):
        w = by_key.get(f.key)
        if w is None:
            active.append(f)
            continue
        matched.add(w.key)
        if not f.waivable:
            active.append(f)
            stale.append(StaleWaiver(w, "finding cannot be waived"))
        elif w.state is WaiverState.APPROVED:
            waived.append(f)
        elif w.state is WaiverState.PROPOSED:
            proposed.append(f)
        else:
            active.append(f)
    for key in sorted(set(by_key) - matched):
        stale.append(StaleWaiver(by_key[key], "no matching finding"))
    stale.sort(key=lambda s: s.waiver.key)
    return ReconciledReport(tuple(active), tuple(waived), tuple(proposed), tuple(stale))
