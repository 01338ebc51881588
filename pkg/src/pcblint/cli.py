"""pcblint command line.

Exit codes: 0 no active findings, 1 active findings (or an incomplete lab
for ``score``), 2 operational error (unreadable file, bad config, ...).
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .bom import bom_csv, generate_bom
from .eagle import BoardDoc, EagleError, LibraryDoc, SchematicDoc, parse_document
from .netlist import build_netlist
from .report import InputFile, Report, netlist_stats
from .rules import ConfigError, Design, Phase, RuleError, RuleSetConfig, run_rules
from .rules.config import default_config, load_config
from .scoring import (
    EventKind,
    LedgerError,
    Outcome,
    compute_score,
    load_ledger,
    record_event,
    save_ledger,
)
from .waivers import (
    WaiverError,
    WaiverState,
    load_waivers,
    propose,
    reconcile,
    review,
    save_waivers,
)

CONFIG_ENV = "PCBLINT_CONFIG"

OPERATIONAL_ERRORS = (EagleError, ConfigError, RuleError, WaiverError, LedgerError, OSError)


class UsageError(Exception):
    pass


def _load_files(paths: Sequence[str]) -> tuple[Design, list[InputFile]]:
    sch: Optional[SchematicDoc] = None
    brd: Optional[BoardDoc] = None
    libs: list[LibraryDoc] = []
    inputs = []
    for path in paths:
        data = Path(path).read_bytes()
        doc = parse_document(data)
        name = Path(path).name
        if isinstance(doc, SchematicDoc):
            if sch is not None:
                raise UsageError("give at most one schematic")
            sch, kind = doc, "schematic"
        elif isinstance(doc, BoardDoc):
            if brd is not None:
                raise UsageError("give at most one board")
            brd, kind = doc, "board"
        else:
            if not doc.name:
                doc = dataclasses.replace(doc, name=Path(path).stem)
            libs.append(doc)
            kind = "library"
        inputs.append(InputFile.of(name, kind, data))
    return Design(sch, brd, tuple(libs)), inputs


def _config(path: Optional[str]) -> RuleSetConfig:
    path = path or os.environ.get(CONFIG_ENV)
    if path:
        return load_config(Path(path))
    return default_config()


def _check(args: argparse.Namespace, phase: Phase) -> int:
    design, inputs = _load_files(args.files)
    config = _config(args.config)
    waivers = []
    if getattr(args, "waivers", None) and Path(args.waivers).exists():
        waivers = load_waivers(Path(args.waivers).read_bytes())
    ledger = None
    if getattr(args, "ledger", None):
        ledger = load_ledger(args.ledger, lab=args.lab)

    netlist = build_netlist(design.schematic) if design.schematic is not None else None
    findings = run_rules(design, netlist, config, args.lab, phase, workers=args.jobs)
    reconciled = reconcile(findings, waivers)
    nets, pinrefs = netlist_stats(netlist)
    report = Report(phase, args.lab, tuple(inputs), reconciled, nets, pinrefs)
    sys.stdout.write(report.to_json() if args.format == "json" else report.to_text())

    if ledger is not None:
        outcome = Outcome.PASSED if not reconciled.active else Outcome.FAILED
        save_ledger(args.ledger, record_event(ledger, EventKind.FULL_CHECK, outcome))
    return 1 if reconciled.active else 0


def cmd_quick(args: argparse.Namespace) -> int:
    return _check(args, Phase.QUICK)


def cmd_full(args: argparse.Namespace) -> int:
    return _check(args, Phase.FULL)


def _read_waivers(path: str, must_exist: bool = True) -> list:
    p = Path(path)
    if not p.exists() and not must_exist:
        return []
    return load_waivers(p.read_bytes())


def cmd_explain(args: argparse.Namespace) -> int:
    waivers = propose(_read_waivers(args.waivers, must_exist=False), args.rule_id,
                      args.locator, args.explanation)
    save_waivers(args.waivers, waivers)
    return 0


def cmd_review(args: argparse.Namespace) -> int:
    if args.charge and not args.ledger:
        raise UsageError("--charge needs --ledger")
    ledger = load_ledger(args.ledger, lab=args.lab) if args.charge else None
    decision = WaiverState.APPROVED if args.decision == "approve" else WaiverState.REJECTED
    waivers = review(_read_waivers(args.waivers), args.rule_id, args.locator, decision, args.note)
    save_waivers(args.waivers, waivers)
    if ledger is not None:
        outcome = Outcome.PASSED if args.charge == "passed" else Outcome.FAILED
        save_ledger(args.ledger, record_event(ledger, EventKind.HUMAN_REVIEW, outcome))
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    score = compute_score(load_ledger(args.ledger))
    print(score.render())
    return 0 if score.complete else 1


def cmd_bom(args: argparse.Namespace) -> int:
    designs = []
    seen: dict[str, int] = {}
    for path in args.files:
        doc = parse_document(Path(path).read_bytes())
        if not isinstance(doc, SchematicDoc):
            raise UsageError(f"{path} is not a schematic")
        stem = Path(path).stem
        seen[stem] = seen.get(stem, 0) + 1
        designs.append((stem if seen[stem] == 1 else f"{stem}-{seen[stem]}", doc))
    text = bom_csv(generate_bom(designs))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_rules(args: argparse.Namespace) -> int:
    config = _config(args.config)
    for lab_id, lab in sorted(config.labs.items()):
        print(f"lab {lab_id} ({', '.join(sorted(lab.documents))})")
        for rule_id in lab.rules:
            r = config.registry[rule_id]
            print(f"  {r.id:<28} {r.phase.value:<5} {r.severity.value:<7} {r.title}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcblint", description="Design checks for Eagle PCB files.")
    parser.add_argument("--version", action="version", version=f"pcblint {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def check_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("files", nargs="+", help=".sch/.brd/.lbr files (kind read from content)")
        p.add_argument("--lab", required=True, help="lab id from the rule-set config, e.g. H3")
        p.add_argument("--config", help=f"rule-set TOML (default: ${CONFIG_ENV} or built-in)")
        p.add_argument("--format", choices=["text", "json"], default="text")
        p.add_argument("--jobs", type=int, default=1, help="evaluate rules in N threads")

    p = sub.add_parser("quick", help="free style checks (warnings only)")
    check_args(p)
    p.set_defaults(func=cmd_quick)

    p = sub.add_parser("full", help="style and correctness checks; charged when --ledger is given")
    check_args(p)
    p.add_argument("--waivers", help="waiver file to reconcile findings against")
    p.add_argument("--ledger", help="lab ledger (JSON) to record this check in")
    p.set_defaults(func=cmd_full)

    p = sub.add_parser("explain", help="propose a waiver for a finding")
    p.add_argument("--waivers", required=True)
    p.add_argument("rule_id")
    p.add_argument("locator")
    p.add_argument("explanation")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("review", help="approve or reject a proposed waiver")
    p.add_argument("--waivers", required=True)
    p.add_argument("rule_id")
    p.add_argument("locator")
    p.add_argument("decision", choices=["approve", "reject"])
    p.add_argument("--note", help="written feedback for the team")
    p.add_argument("--ledger", help="lab ledger (JSON)")
    p.add_argument("--lab", help="lab id, needed when the ledger file does not exist yet")
    p.add_argument("--charge", choices=["passed", "failed"],
                   help="also record a human review with this outcome in the ledger")
    p.set_defaults(func=cmd_review)

    p = sub.add_parser("score", help="print the lab score from a ledger")
    p.add_argument("--ledger", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bom", help="combined bill of materials for several schematics")
    p.add_argument("files", nargs="+")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_bom)

    p = sub.add_parser("rules", help="list the rules each lab runs")
    p.add_argument("--config")
    p.set_defaults(func=cmd_rules)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except (UsageError, *OPERATIONAL_ERRORS) as exc:
        print(f"pcblint: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
