"""Immutable in-memory models of Eagle schematic, board and library files.

All coordinates are millimetres. Name lookups are case-sensitive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional

_EMPTY: Mapping[str, str] = MappingProxyType({})


@dataclass(frozen=True)
class Rotation:
    angle: float = 0.0
    mirrored: bool = False
    spin: bool = False

    def __str__(self) -> str:
        prefix = ("S" if self.spin else "") + ("M" if self.mirrored else "")
        angle = int(self.angle) if float(self.angle).is_integer() else self.angle
        return f"{prefix}R{angle}"


@dataclass(frozen=True)
class TextItem:
    content: str
    layer: int
    x: float
    y: float
    size: float = 0.0


@dataclass(frozen=True)
class Wire:
    """A straight segment. Used for graphics, outlines and copper tracks."""

    x1: float
    y1: float
    x2: float
    y2: float
    layer: int
    width: float = 0.0


# -- library level ----------------------------------------------------------


@dataclass(frozen=True)
class Smd:
    name: str
    x: float
    y: float
    dx: float
    dy: float
    layer: int


@dataclass(frozen=True)
class ThruPad:
    name: str
    x: float
    y: float
    drill: float


@dataclass(frozen=True)
class Package:
    name: str
    smds: tuple[Smd, ...] = ()
    pads: tuple[ThruPad, ...] = ()
    texts: tuple[TextItem, ...] = ()
    wires: tuple[Wire, ...] = ()

    def pad_names(self) -> frozenset[str]:
        return frozenset(p.name for p in self.smds) | frozenset(p.name for p in self.pads)


@dataclass(frozen=True)
class Pin:
    name: str
    x: float
    y: float
    direction: str = "io"
    visible: bool = True


@dataclass(frozen=True)
class Symbol:
    name: str
    pins: tuple[Pin, ...] = ()

    def pin(self, name: str) -> Optional[Pin]:
        for p in self.pins:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class Gate:
    name: str
    symbol: str
    x: float = 0.0
    y: float = 0.0


@dataclass(frozen=True)
class Connect:
    gate: str
    pin: str
    pads: tuple[str, ...]


@dataclass(frozen=True)
class Device:
    name: str
    package: Optional[str]
    connects: tuple[Connect, ...] = ()

    def pads_for(self, gate: str, pin: str) -> tuple[str, ...]:
        for c in self.connects:
            if c.gate == gate and c.pin == pin:
                return c.pads
        return ()


@dataclass(frozen=True)
class DeviceSet:
    name: str
    prefix: str = ""
    uservalue: bool = False
    gates: tuple[Gate, ...] = ()
    devices: tuple[Device, ...] = ()

    def gate(self, name: str) -> Optional[Gate]:
        for g in self.gates:
            if g.name == name:
                return g
        return None

    def device(self, name: str) -> Optional[Device]:
        for d in self.devices:
            if d.name == name:
                return d
        return None


@dataclass(frozen=True)
class LibraryDoc:
    name: str
    packages: Mapping[str, Package] = field(default=_EMPTY, hash=False)
    symbols: Mapping[str, Symbol] = field(default=_EMPTY, hash=False)
    devicesets: Mapping[str, DeviceSet] = field(default=_EMPTY, hash=False)
    version: str = ""


# -- schematic --------------------------------------------------------------


@dataclass(frozen=True)
class Part:
    name: str
    library: str
    deviceset: str
    device: str = ""
    value: Optional[str] = None
    attributes: Mapping[str, str] = field(default=_EMPTY, hash=False)


@dataclass(frozen=True)
class Instance:
    part: str
    gate: str
    x: float
    y: float
    rotation: Rotation = Rotation()


@dataclass(frozen=True)
class PinRef:
    part: str
    gate: str
    pin: str


@dataclass(frozen=True)
class Segment:
    pinrefs: tuple[PinRef, ...] = ()
    labels: tuple[tuple[float, float], ...] = ()
    wires: tuple[Wire, ...] = ()


@dataclass(frozen=True)
class Net:
    name: str
    net_class: int = 0
    segments: tuple[Segment, ...] = ()

    @property
    def pinrefs(self) -> tuple[PinRef, ...]:
        return tuple(p for s in self.segments for p in s.pinrefs)


@dataclass(frozen=True)
class Sheet:
    instances: tuple[Instance, ...] = ()
    nets: tuple[Net, ...] = ()
    texts: tuple[TextItem, ...] = ()
    plain_wires: tuple[Wire, ...] = ()


@dataclass(frozen=True)
class SchematicDoc:
    version: str = ""
    embedded_libraries: Mapping[str, LibraryDoc] = field(default=_EMPTY, hash=False)
    parts: tuple[Part, ...] = ()
    sheets: tuple[Sheet, ...] = ()
    _by_name: Mapping[str, Part] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_name", MappingProxyType({p.name: p for p in self.parts}))

    def part(self, name: str) -> Optional[Part]:
        return self._by_name.get(name)

    def deviceset_of(self, part: Part) -> DeviceSet:
        return self.embedded_libraries[part.library].devicesets[part.deviceset]

    def device_of(self, part: Part) -> Optional[Device]:
        return self.deviceset_of(part).device(part.device)

    def symbol_of(self, part: Part, gate: str) -> Symbol:
        lib = self.embedded_libraries[part.library]
        g = lib.devicesets[part.deviceset].gate(gate)
        if g is None:
            raise KeyError(f"{part.name} has no gate {gate!r}")
        return lib.symbols[g.symbol]

    def has_pin(self, part: str, gate: str, pin: str) -> bool:
        p = self.part(part)
        if p is None:
            return False
        try:
            return self.symbol_of(p, gate).pin(pin) is not None
        except KeyError:
            return False


# -- board ------------------------------------------------------------------


@dataclass(frozen=True)
class Element:
    name: str
    library: str
    package: str
    value: str = ""
    x: float = 0.0
    y: float = 0.0
    rotation: Rotation = Rotation()

    @property
    def mirrored(self) -> bool:
        return self.rotation.mirrored


@dataclass(frozen=True)
class ContactRef:
    element: str
    pad: str


@dataclass(frozen=True)
class Via:
    x: float
    y: float
    first_layer: int
    last_layer: int
    drill: float = 0.0


@dataclass(frozen=True)
class Signal:
    name: str
    contactrefs: tuple[ContactRef, ...] = ()
    wires: tuple[Wire, ...] = ()
    vias: tuple[Via, ...] = ()


@dataclass(frozen=True)
class BoardDoc:
    version: str = ""
    embedded_libraries: Mapping[str, LibraryDoc] = field(default=_EMPTY, hash=False)
    elements: tuple[Element, ...] = ()
    signals: tuple[Signal, ...] = ()
    outline_wires: tuple[Wire, ...] = ()
    texts: tuple[TextItem, ...] = ()
    _by_name: Mapping[str, Element] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_name", MappingProxyType({e.name: e for e in self.elements}))

    def element(self, name: str) -> Optional[Element]:
        return self._by_name.get(name)

    def package_of(self, element: Element) -> Package:
        return self.embedded_libraries[element.library].packages[element.package]
