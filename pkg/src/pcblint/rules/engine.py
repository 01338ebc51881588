"""Rule registry and the quick/full check runner."""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Callable, Iterable, Mapping, Optional

from ..eagle import BoardDoc, LibraryDoc, SchematicDoc
from ..netlist import Netlist, build_netlist

if TYPE_CHECKING:
    from .config import CheckParams, RuleSetConfig

INTERNAL_RULE = "X0-internal"


class Severity(str, enum.Enum):
    WARNING = "warning"
    ERROR = "error"


class Phase(str, enum.Enum):
    QUICK = "quick"
    FULL = "full"


class DocKind(str, enum.Enum):
    SCHEMATIC = "schematic"
    BOARD = "board"
    LIBRARY = "library"
    PAIR = "schematic+board"

    def needs(self) -> frozenset[str]:
        return frozenset(self.value.split("+"))


class RuleError(Exception):
    pass


class UnknownLab(RuleError):
    pass


class MissingDocument(RuleError):
    pass


@dataclass(frozen=True)
class Finding:
    rule_id: str
    locator: str
    severity: Severity
    message: str
    waivable: bool = True

    @property
    def key(self) -> tuple[str, str]:
        return (self.rule_id, self.locator)

    def to_dict(self) -> dict[str, Any]:
        return {
            "rule_id": self.rule_id,
            "severity": self.severity.value,
            "locator": self.locator,
            "message": self.message,
            "waivable": self.waivable,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Finding":
        return cls(
            rule_id=d["rule_id"],
            locator=d["locator"],
            severity=Severity(d["severity"]),
            message=d["message"],
            waivable=d.get("waivable", True),
        )


@dataclass(frozen=True)
class Design:
    """The documents one check run looks at."""

    schematic: Optional[SchematicDoc] = None
    board: Optional[BoardDoc] = None
    libraries: tuple[LibraryDoc, ...] = ()

    def available(self) -> frozenset[str]:
        have = set()
        if self.schematic is not None:
            have.add("schematic")
        if self.board is not None:
            have.add("board")
        if self.libraries:
            have.add("library")
        return frozenset(have)


@dataclass
class RuleContext:
    rule: "Rule"
    design: Design
    params: "CheckParams"
    options: Mapping[str, Any]
    _netlist: Optional[Netlist] = None

    @property
    def schematic(self) -> SchematicDoc:
        assert self.design.schematic is not None
        return self.design.schematic

    @property
    def board(self) -> BoardDoc:
        assert self.design.board is not None
        return self.design.board

    @property
    def netlist(self) -> Netlist:
        if self._netlist is None:
            self._netlist = build_netlist(self.schematic)
        return self._netlist

    def finding(self, locator: str, message: str, severity: Optional[Severity] = None) -> Finding:
        return Finding(
            rule_id=self.rule.id,
            locator=locator,
            severity=severity or self.rule.severity,
            message=message,
            waivable=self.rule.waivable,
        )


Check = Callable[[RuleContext], Iterable[Finding]]


@dataclass(frozen=True)
class Rule:
    id: str
    title: str
    severity: Severity
    phase: Phase
    applies_to: frozenset[DocKind]
    check: Check = field(compare=False, repr=False)
    waivable: bool = True
    options: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.phase is Phase.QUICK and self.severity is not Severity.WARNING:
            raise ValueError(f"quick rule {self.id} must be a warning")
        if self.id.startswith("X"):
            raise ValueError(f"rule id prefix X is reserved: {self.id}")
        if not self.applies_to:
            raise ValueError(f"rule {self.id} applies to nothing")

    def runnable_with(self, documents: Iterable[str]) -> bool:
        have = frozenset(documents)
        return any(kind.needs() <= have for kind in self.applies_to)


class Registry:
    def __init__(self) -> None:
        self._rules: dict[str, Rule] = {}

    def add(self, rule: Rule) -> Rule:
        if rule.id in self._rules:
            raise ValueError(f"duplicate rule id {rule.id}")
        self._rules[rule.id] = rule
        return rule

    def rule(
        self,
        rule_id: str,
        title: str,
        severity: Severity,
        phase: Phase,
        applies_to: Iterable[DocKind],
        waivable: bool = True,
        options: Iterable[str] = (),
    ) -> Callable[[Check], Check]:
        def register(fn: Check) -> Check:
            self.add(
                Rule(rule_id, title, severity, phase, frozenset(applies_to), fn, waivable,
                     frozenset(options))
            )
            return fn

        return register

    def __getitem__(self, rule_id: str) -> Rule:
        return self._rules[rule_id]

    def __contains__(self, rule_id: object) -> bool:
        return rule_id in self._rules

    def __iter__(self):
        return iter(sorted(self._rules.values(), key=lambda r: r.id))

    def __len__(self) -> int:
        return len(self._rules)


def _internal(rule_id: str, message: str) -> Finding:
    return Finding(INTERNAL_RULE, f"rule:{rule_id}", Severity.ERROR, message, waivable=False)


def _evaluate(ctx: RuleContext) -> list[Finding]:
    try:
        found = list(ctx.rule.check(ctx))
    except Exception as exc:  # a broken rule must still show up in the report
        return [_internal(ctx.rule.id, f"rule raised {type(exc).__name__}: {exc}")]
    out: dict[tuple[str, str], Finding] = {}
    problems = []
    for f in found:
        if f.rule_id != ctx.rule.id:
            problems.append(_internal(ctx.rule.id, f"rule emitted a finding for {f.rule_id}"))
        elif f.key in out and out[f.key] != f:
            problems.append(_internal(ctx.rule.id, f"two findings share locator {f.locator}"))
        else:
            out.setdefault(f.key, f)
    return list(out.values()) + problems[:1]


def run_rules(
    design: Design,
    netlist: Optional[Netlist],
    config: "RuleSetConfig",
    lab: str,
    phase: Phase,
    workers: int = 1,
) -> list[Finding]:
    """Run one lab's rules. A full run includes the quick rules."""
    try:
        lab_cfg = config.labs[lab]
    except KeyError:
        raise UnknownLab(lab) from None
    missing = lab_cfg.documents - design.available()
    if missing:
        raise MissingDocument(f"lab {lab} needs: {', '.join(sorted(missing))}")
    if netlist is None and design.schematic is not None:
        netlist = build_netlist(design.schematic)

    phases = {Phase.QUICK} if phase is Phase.QUICK else {Phase.QUICK, Phase.FULL}
    contexts = []
    for rule_id in lab_cfg.rules:
        rule = config.registry[rule_id]
        if rule.phase not in phases or not rule.runnable_with(design.available()):
            continue
        contexts.append(
            RuleContext(
                rule=rule,
                design=design,
                params=lab_cfg.params_for(rule_id),
                options=lab_cfg.options_for(rule_id),
                _netlist=netlist,
            )
        )

    if workers > 1 and len(contexts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_evaluate, contexts))
    else:
        batches = [_evaluate(c) for c in contexts]
    return sorted((f for batch in batches for f in batch), key=sort_key)


def sort_key(f: Finding) -> tuple[str, str]:
    return f.key
