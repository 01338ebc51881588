"""Pin-level connectivity derived from a schematic, and board cross-checks."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, NamedTuple, Optional, Union

from .eagle import BoardDoc, SchematicDoc


class PinInstance(NamedTuple):
    part: str
    gate: str
    pin: str

    def __str__(self) -> str:
        return f"{self.part}.{self.gate}.{self.pin}"


class UnknownPin(KeyError):
    pass


@dataclass(frozen=True)
class ElectricalNet:
    name: str
    members: frozenset[PinInstance]

    def parts(self) -> frozenset[str]:
        return frozenset(p.part for p in self.members)


@dataclass(frozen=True)
class Netlist:
    nets: Mapping[str, ElectricalNet]
    pin_index: Mapping[PinInstance, str]
    unconnected_pins: frozenset[PinInstance]
    known_pins: frozenset[PinInstance]
    pinref_count: int

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Netlist):
            return NotImplemented
        return (
            dict(self.nets) == dict(other.nets)
            and dict(self.pin_index) == dict(other.pin_index)
            and self.unconnected_pins == other.unconnected_pins
            and self.known_pins == other.known_pins
            and self.pinref_count == other.pinref_count
        )

    __hash__ = None  # type: ignore[assignment]


def _all_pins(sch: SchematicDoc) -> set[PinInstance]:
    pins = set()
    for part in sch.parts:
        lib = sch.embedded_libraries[part.library]
        for gate in sch.deviceset_of(part).gates:
            for pin in lib.symbols[gate.symbol].pins:
                pins.add(PinInstance(part.name, gate.name, pin.name))
    return pins


def build_netlist(sch: SchematicDoc) -> Netlist:
    members: dict[str, set[PinInstance]] = {}
    pinrefs = 0
    for sheet in sch.sheets:
        for net in sheet.nets:
            bucket = members.setdefault(net.name, set())
            for ref in net.pinrefs:
                bucket.add(PinInstance(ref.part, ref.gate, ref.pin))
                pinrefs += 1

    nets = {
        name: ElectricalNet(name, frozenset(pins)) for name, pins in sorted(members.items())
    }
    index = {pin: name for name, net in nets.items() for pin in net.members}

    placed = {(i.part, i.gate) for sheet in sch.sheets for i in sheet.instances}
    known = _all_pins(sch)
    unconnected = frozenset(
        p for p in known if (p.part, p.gate) in placed and p not in index
    )
    return Netlist(
        nets=MappingProxyType(nets),
        pin_index=MappingProxyType(index),
        unconnected_pins=unconnected,
        known_pins=frozenset(known),
        pinref_count=pinrefs,
    )


def net_of(nl: Netlist, pin: Union[PinInstance, tuple[str, str, str]]) -> Optional[str]:
    pin = PinInstance(*pin)
    if pin not in nl.known_pins:
        raise UnknownPin(str(pin))
    return nl.pin_index.get(pin)


def pins_of(nl: Netlist, net_name: str) -> frozenset[PinInstance]:
    net = nl.nets.get(net_name)
    return net.members if net is not None else frozenset()


# -- schematic vs board -----------------------------------------------------


@dataclass(frozen=True)
class MissingElement:
    part: str

    def describe(self) -> str:
        return f"part {self.part} has no board element"


@dataclass(frozen=True)
class ExtraElement:
    element: str

    def describe(self) -> str:
        return f"board element {self.element} has no schematic part"


@dataclass(frozen=True)
class SignalMismatch:
    element: str
    pad: str
    schematic_net: Optional[str]
    board_signal: Optional[str]

    def describe(self) -> str:
        return (
            f"{self.element} pad {self.pad} is on net {self.schematic_net or '(none)'} "
            f"in the schematic but on signal {self.board_signal or '(none)'} on the board"
        )


@dataclass(frozen=True)
class UnknownSignal:
    signal: str

    def describe(self) -> str:
        return f"board signal {self.signal} does not exist in the schematic"


Inconsistency = Union[MissingElement, ExtraElement, SignalMismatch, UnknownSignal]


def check_board_consistency(sch: SchematicDoc, brd: BoardDoc) -> list[Inconsistency]:
    """Compare parts/elements, pin-to-pad connectivity and net/signal names.

    Pins are mapped to pads through the device connect table; pins with no
    pad are skipped, as are parts that have no element on the board.
    """
    nl = build_netlist(sch)
    out: list[Inconsistency] = []
    part_names = {p.name for p in sch.parts}
    element_names = {e.name for e in brd.elements}
    out += [MissingElement(p.name) for p in sch.parts if p.name not in element_names]
    out += [ExtraElement(e.name) for e in brd.elements if e.name not in part_names]

    board_signal: dict[tuple[str, str], str] = {}
    for sig in brd.signals:
        for ref in sig.contactrefs:
            board_signal[(ref.element, ref.pad)] = sig.name

    expected: dict[tuple[str, str], Optional[str]] = {}
    for part in sch.parts:
        if part.name not in element_names:
            continue
        device = sch.device_of(part)
        if device is None:
            continue
        for c in device.connects:
            net = nl.pin_index.get(PinInstance(part.name, c.gate, c.pin))
            for pad in c.pads:
                expected[(part.name, pad)] = net

    for key in sorted(set(expected) | set(board_signal)):
        if key[0] not in part_names:
            continue
        want = expected.get(key)
        got = board_signal.get(key)
        if want != got:
            out.append(SignalMismatch(key[0], key[1], want, got))

    out += [UnknownSignal(s.name) for s in brd.signals if s.name not in nl.nets]
    return out
