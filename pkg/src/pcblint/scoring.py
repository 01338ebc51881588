"""Pay-for-review lab scores.

A lab is worth 10 points. Teams start with 12 and every full check or
human review they ask for costs 0.5, passed or not. A lab is complete once
both a full check and a human review have passed, so the best possible
score is 11 out of 10. Quick checks are free and never recorded.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path
from typing import Optional, Union

from .waivers import write_atomic

BASE_WORTH = Decimal("10")
STARTING_BALANCE = Decimal("12")
COST_PER_REVIEW = Decimal("0.5")


class LedgerError(ValueError):
    pass


class EventKind(str, enum.Enum):
    FULL_CHECK = "FullCheck"
    HUMAN_REVIEW = "HumanReview"


class Outcome(str, enum.Enum):
    PASSED = "Passed"
    FAILED = "Failed"


@dataclass(frozen=True)
class ReviewEvent:
    t: str
    kind: EventKind
    outcome: Outcome


@dataclass(frozen=True)
class ReviewLedger:
    lab: str
    events: tuple[ReviewEvent, ...] = ()
    base_worth: Decimal = field(default=BASE_WORTH, compare=False)
    starting_balance: Decimal = field(default=STARTING_BALANCE, compare=False)
    cost_per_review: Decimal = field(default=COST_PER_REVIEW, compare=False)


@dataclass(frozen=True)
class LabScore:
    complete: bool
    score: Optional[Decimal] = None
    out_of: Decimal = BASE_WORTH

    def render(self) -> str:
        if not self.complete:
            return "incomplete"
        return f"{self.score:.1f} / {self.out_of:g}"


def utc_now() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")


def record_event(
    ledger: ReviewLedger, kind: EventKind, outcome: Outcome, t: Optional[str] = None
) -> ReviewLedger:
    kind, outcome = EventKind(kind), Outcome(outcome)
    event = ReviewEvent(t or utc_now(), kind, outcome)
    return replace(ledger, events=ledger.events + (event,))


def compute_score(ledger: ReviewLedger) -> LabScore:
    passed = {(e.kind, e.outcome) for e in ledger.events}
    complete = (EventKind.FULL_CHECK, Outcome.PASSED) in passed and (
        EventKind.HUMAN_REVIEW,
        Outcome.PASSED,
    ) in passed
    if not complete:
        return LabScore(False, out_of=ledger.base_worth)
    spent = ledger.cost_per_review * len(ledger.events)
    return LabScore(True, max(Decimal(0), ledger.starting_balance - spent), ledger.base_worth)


# -- persistence ------------------------------------------------------------


def ledger_to_json(ledger: ReviewLedger) -> str:
    doc = {
        "lab": ledger.lab,
        "events": [
            {"t": e.t, "kind": e.kind.value, "outcome": e.outcome.value} for e in ledger.events
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def ledger_from_json(text: Union[str, bytes]) -> ReviewLedger:
    try:
        doc = json.loads(text)
        events = tuple(
            ReviewEvent(str(e["t"]), EventKind(e["kind"]), Outcome(e["outcome"]))
            for e in doc["events"]
        )
        lab = doc["lab"]
    except (ValueError, KeyError, TypeError) as exc:
        raise LedgerError(f"bad ledger: {exc}") from None
    if not isinstance(lab, str) or not lab:
        raise LedgerError("bad ledger: lab must be a non-empty string")
    return ReviewLedger(lab=lab, events=events)


def load_ledger(path: Union[str, Path], lab: Optional[str] = None) -> ReviewLedger:
    """Read a ledger file; a missing file starts an empty ledger for ``lab``."""
    path = Path(path)
    if not path.exists():
        if lab is None:
            raise LedgerError(f"{path} does not exist")
        return ReviewLedger(lab=lab)
    ledger = ledger_from_json(path.read_text("utf-8"))
    if lab is not None and ledger.lab != lab:
        raise LedgerError(f"{path} belongs to lab {ledger.lab}, not {lab}")
    return ledger


def save_ledger(path: Union[str, Path], ledger: ReviewLedger) -> None:
    write_atomic(path, ledger_to_json(ledger))
