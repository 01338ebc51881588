"""The built-in rule catalog.

S* rules are quick-phase style warnings; F* rules run only in full checks.
Every rule takes its thresholds and part/pin names from CheckParams so
course staff can retune them in the rule-set file.
"""

from __future__ import annotations

from typing import Iterator, Optional

from .eagle import SchematicDoc
from .eagle.layers import COPPER
from .netlist import (
    ExtraElement,
    MissingElement,
    PinInstance,
    SignalMismatch,
    UnknownSignal,
    check_board_consistency,
)
from .pattern import compile_pattern, match_pattern
from .query import From, Selection, glob_match
from .rules.engine import DocKind, Finding, Phase, Registry, RuleContext, Severity
from .rules.locator import locator

REGISTRY = Registry()
rule = REGISTRY.rule

W, E = Severity.WARNING, Severity.ERROR
QUICK, FULL = Phase.QUICK, Phase.FULL
SCH, BRD, LIB, PAIR = DocKind.SCHEMATIC, DocKind.BOARD, DocKind.LIBRARY, DocKind.PAIR

GRID_TOLERANCE = 1e-6  # mm


def _q(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _direction(sch: SchematicDoc, pin: PinInstance) -> Optional[str]:
    part = sch.part(pin.part)
    if part is None:
        return None
    found = sch.symbol_of(part, pin.gate).pin(pin.pin)
    return found.direction if found is not None else None


def _part_pins(sch: SchematicDoc, part_name: str) -> list[PinInstance]:
    return sorted(From(sch).parts().matching(lambda p: p.name == part_name).pins())


def _literal_tnames(texts) -> list:
    return Selection("texts", texts, None).with_layer("tNames").without_text(">NAME").collect()


@rule("S1-tnames-literal", "Only >NAME belongs on tNames", W, QUICK, [SCH, LIB])
def tnames_literal(ctx: RuleContext) -> Iterator[Finding]:
    design = ctx.design
    if design.schematic is not None:
        sch = design.schematic
        for sheet in sch.sheets:
            for text in _literal_tnames(sheet.texts):
                yield ctx.finding(
                    locator(sch, sheet, text), f"literal text {text.content!r} on tNames"
                )
        for lib in sch.embedded_libraries.values():
            for pkg in lib.packages.values():
                for text in _literal_tnames(pkg.texts):
                    yield ctx.finding(
                        locator(sch, lib, pkg, text),
                        f"package {pkg.name} has literal text {text.content!r} on tNames",
                    )
    for lib in design.libraries:
        prefix = f"library:{lib.name}/" if lib.name else ""
        for pkg in lib.packages.values():
            for text in _literal_tnames(pkg.texts):
                yield ctx.finding(
                    prefix + locator(pkg, text),
                    f"package {pkg.name} has literal text {text.content!r} on tNames",
                )


@rule("S2-missing-value", "Parts with user values need a value", W, QUICK, [SCH])
def missing_value(ctx: RuleContext) -> Iterator[Finding]:
    sch = ctx.schematic
    for part in sch.parts:
        if sch.deviceset_of(part).uservalue and not (part.value or "").strip():
            yield ctx.finding(locator(part), f"{part.name} ({part.deviceset}) has no value")


@rule("S3-dangling-pin", "Placed pins should be connected", W, QUICK, [SCH])
def dangling_pin(ctx: RuleContext) -> Iterator[Finding]:
    for pin in sorted(ctx.netlist.unconnected_pins):
        if _direction(ctx.schematic, pin) != "nc":
            yield ctx.finding(locator(pin), f"pin {pin} is not connected to any net")


@rule("S4-off-grid", "Instances sit on the placement grid", W, QUICK, [SCH])
def off_grid(ctx: RuleContext) -> Iterator[Finding]:
    grid = ctx.params.placement_grid
    sch = ctx.schematic

    def on_grid(v: float) -> bool:
        return abs(v - round(v / grid) * grid) <= GRID_TOLERANCE

    for sheet in sch.sheets:
        for inst in sheet.instances:
            if not (on_grid(inst.x) and on_grid(inst.y)):
                yield ctx.finding(
                    locator(sch, sheet, inst),
                    f"{inst.part}.{inst.gate} at ({inst.x:g}, {inst.y:g}) is off the "
                    f"{grid:g} mm grid",
                )


def status_led_pattern(p) -> str:
    return (
        f"part(name={_q(p.mcu_part)}) pin({_q(p.led_driver_pin)}) net(*) "
        f"pin(*) part(deviceset={_q(p.resistor_deviceset)}) pin(*) net(*) "
        f"pin({_q(p.led_anode_pin)}) part(deviceset={_q(p.led_deviceset)}) "
        f"pin({_q(p.led_cathode_pin)}) net({_q(p.ground_net)})"
    )


@rule("F1-status-led-path", "Status LED is driven through a resistor", E, FULL, [SCH],
      options=["pattern"])
def status_led_path(ctx: RuleContext) -> Iterator[Finding]:
    p = ctx.params
    pat = compile_pattern(ctx.options.get("pattern") or status_led_pattern(p))
    if match_pattern(ctx.netlist, ctx.schematic, pat):
        return
    mcu = From(ctx.schematic).parts().with_name(p.mcu_part).first()
    where = locator(mcu) if mcu is not None else "schematic"
    yield ctx.finding(
        where,
        f"no path {p.led_driver_pin} -> resistor -> LED anode, cathode -> {p.ground_net}",
    )


@rule("F2-reset-wiring", "Reset is pulled up through a resistor", E, FULL, [SCH],
      options=["pattern"])
def reset_wiring(ctx: RuleContext) -> Iterator[Finding]:
    p = ctx.params
    sch, nl = ctx.schematic, ctx.netlist
    for mcu in From(sch).parts().with_name(p.mcu_part):
        for pin in _part_pins(sch, mcu.name):
            if not glob_match(p.reset_pin, pin.pin):
                continue
            if pin not in nl.pin_index:
                yield ctx.finding(locator(pin), f"{pin} is not connected (missing reset)", W)
                continue
            text = ctx.options.get("pattern") or (
                f"part(name={_q(mcu.name)}) pin({_q(pin.pin)}) net(*) pin(*) "
                f"part(deviceset={_q(p.resistor_deviceset)}) pin(*) net({_q(p.reset_pullup_net)})"
            )
            bindings = match_pattern(nl, sch, compile_pattern(text))
            if not any(b.pins[0] == pin for b in bindings):
                yield ctx.finding(
                    locator(pin),
                    f"{pin} is on net {nl.pin_index[pin]} but is not pulled up to "
                    f"{p.reset_pullup_net} through a resistor",
                )


@rule("F3-power-short", "Supply pins of different rails are not joined", E, FULL, [SCH],
      waivable=False)
def power_short(ctx: RuleContext) -> Iterator[Finding]:
    rails = ctx.params.power_pin_nets
    sch = ctx.schematic
    for name, net in sorted(ctx.netlist.nets.items()):
        expected: dict[str, list[PinInstance]] = {}
        for pin in sorted(net.members):
            if pin.pin in rails and _direction(sch, pin) == "pwr":
                expected.setdefault(rails[pin.pin], []).append(pin)
        if len(expected) > 1:
            detail = "; ".join(
                f"{rail}: {', '.join(map(str, pins))}" for rail, pins in sorted(expected.items())
            )
            yield ctx.finding(locator(net), f"net {name} shorts supply rails ({detail})")


@rule("F4-decoupling", "IC supply pins have a decoupling capacitor", E, FULL, [SCH])
def decoupling(ctx: RuleContext) -> Iterator[Finding]:
    p = ctx.params
    sch, nl = ctx.schematic, ctx.netlist
    bridged = set()
    for cap in From(sch).parts().with_deviceset(p.decoupling_cap_deviceset):
        nets = {nl.pin_index.get(pin) for pin in _part_pins(sch, cap.name)}
        if p.ground_net in nets:
            bridged |= nets - {None, p.ground_net}
    for ic in From(sch).parts().with_name(p.ic_part):
        for pin in _part_pins(sch, ic.name):
            if _direction(sch, pin) != "pwr":
                continue
            net = nl.pin_index.get(pin)
            if net is None or net == p.ground_net or net not in p.power_net_names:
                continue
            if net not in bridged:
                yield ctx.finding(
                    locator(pin),
                    f"{pin} on {net} has no capacitor ({p.decoupling_cap_deviceset}) "
                    f"to {p.ground_net}",
                )


@rule("F5-board-sch-agree", "Board matches schematic", E, FULL, [PAIR])
def board_matches_schematic(ctx: RuleContext) -> Iterator[Finding]:
    for issue in check_board_consistency(ctx.schematic, ctx.board):
        if isinstance(issue, MissingElement):
            where = f"part:{issue.part}"
        elif isinstance(issue, ExtraElement):
            where = f"element:{issue.element}"
        elif isinstance(issue, SignalMismatch):
            where = f"element:{issue.element}/pad:{issue.pad}"
        elif isinstance(issue, UnknownSignal):
            where = f"signal:{issue.signal}"
        else:  # pragma: no cover
            raise TypeError(issue)
        yield ctx.finding(where, issue.describe())


def outline_box(board) -> Optional[tuple[float, float, float, float]]:
    wires = board.outline_wires
    if not wires:
        return None
    xs = [v for w in wires for v in (w.x1, w.x2)]
    ys = [v for w in wires for v in (w.y1, w.y2)]
    return min(xs), min(ys), max(xs), max(ys)


@rule("F6-board-extent", "Board fits the size limit", E, FULL, [BRD])
def board_extent(ctx: RuleContext) -> Iterator[Finding]:
    box = outline_box(ctx.board)
    if box is None:
        yield ctx.finding("outline", "NoOutline: no board outline on layer 20 (Dimension)")
        return
    limit = ctx.params.board_max_extent
    width, height = box[2] - box[0], box[3] - box[1]
    if width > limit + GRID_TOLERANCE or height > limit + GRID_TOLERANCE:
        yield ctx.finding(
            "outline", f"board is {width:g} x {height:g} mm, limit is {limit:g} mm per side"
        )


@rule("F7-elements-inside-outline", "Elements sit inside the outline", E, FULL, [BRD])
def elements_inside(ctx: RuleContext) -> Iterator[Finding]:
    box = outline_box(ctx.board)
    if box is None:
        return
    x0, y0, x1, y1 = box
    tol = GRID_TOLERANCE
    for e in ctx.board.elements:
        if not (x0 - tol <= e.x <= x1 + tol and y0 - tol <= e.y <= y1 + tol):
            yield ctx.finding(
                locator(e), f"{e.name} at ({e.x:g}, {e.y:g}) is outside the board outline"
            )


@rule("F8-copper-layers", "Copper only on the board's layers", E, FULL, [BRD])
def copper_layers(ctx: RuleContext) -> Iterator[Finding]:
    allowed = ctx.params.allowed_copper_layers
    layers = ", ".join(map(str, sorted(allowed)))
    for sig in ctx.board.signals:
        for wire in sig.wires:
            if wire.layer in COPPER and wire.layer not in allowed:
                yield ctx.finding(
                    locator(sig, wire),
                    f"track in {sig.name} on layer {wire.layer}; allowed: {layers}",
                )
        for via in sig.vias:
            if via.first_layer not in allowed or via.last_layer not in allowed:
                yield ctx.finding(
                    locator(sig, via),
                    f"via in {sig.name} spans {via.first_layer}-{via.last_layer}; "
                    f"allowed: {layers}",
                )
