"""Eagle 6.x-9.x XML reader.

Unknown elements and attributes are skipped. Every cross reference is
resolved while parsing, so a returned document never dangles.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from types import MappingProxyType
from typing import Iterable, Optional, Union

from .model import (
    BoardDoc,
    Connect,
    ContactRef,
    Device,
    DeviceSet,
    Element,
    Gate,
    Instance,
    LibraryDoc,
    Net,
    Package,
    Part,
    Pin,
    PinRef,
    Rotation,
    SchematicDoc,
    Segment,
    Sheet,
    Signal,
    Smd,
    Symbol,
    TextItem,
    ThruPad,
    Via,
    Wire,
)

Document = Union[SchematicDoc, BoardDoc, LibraryDoc]

OUTLINE_LAYER = 20
_ROT = re.compile(r"^([SM]*)R(-?\d+(?:\.\d+)?)$")


class EagleError(Exception):
    """Base class for everything the reader rejects."""


class MalformedXml(EagleError):
    pass


class NotASchematic(EagleError):
    pass


class NotABoard(EagleError):
    pass


class NotALibrary(EagleError):
    pass


class UnknownDocument(EagleError):
    pass


class BrokenReference(EagleError):
    def __init__(self, reference: str, detail: str):
        super().__init__(f"broken reference {reference!r}: {detail}")
        self.reference = reference


class DuplicateName(EagleError):
    def __init__(self, kind: str, name: str):
        super().__init__(f"duplicate {kind} name {name!r}")
        self.kind = kind
        self.name = name


class ConflictingConnection(EagleError):
    """A pin attached to two differently named nets."""


def _mm(value: Optional[str], default: float = 0.0) -> float:
    # Eagle XML stores millimetres; rounding pins the value to 1e-6 mm
    if value is None or value == "":
        return default
    return round(float(value), 6)


def _int(value: Optional[str], default: int = 0) -> int:
    if value is None or value == "":
        return default
    return int(value)


def _yes(value: Optional[str], default: bool = False) -> bool:
    if value is None:
        return default
    return value.strip().lower() in ("yes", "true", "1")


def parse_rotation(text: Optional[str]) -> Rotation:
    if not text:
        return Rotation()
    m = _ROT.match(text.strip())
    if m is None:
        raise MalformedXml(f"bad rotation {text!r}")
    flags, angle = m.groups()
    return Rotation(float(angle), mirrored="M" in flags, spin="S" in flags)


def _root(data: Union[bytes, str], wrong_kind: type = UnknownDocument) -> ET.Element:
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from None
    if root.tag != "eagle":
        raise wrong_kind(f"root element is <{root.tag}>, expected <eagle>")
    return root


def _drawing_child(root: ET.Element, tag: str) -> Optional[ET.Element]:
    drawing = root.find("drawing")
    return None if drawing is None else drawing.find(tag)


def _unique(items: Iterable, kind: str) -> None:
    seen = set()
    for item in items:
        if item.name in seen:
            raise DuplicateName(kind, item.name)
        seen.add(item.name)


def _text(el: ET.Element) -> TextItem:
    return TextItem(
        content=el.text or "",
        layer=_int(el.get("layer")),
        x=_mm(el.get("x")),
        y=_mm(el.get("y")),
        size=_mm(el.get("size")),
    )


def _wire(el: ET.Element) -> Wire:
    return Wire(
        x1=_mm(el.get("x1")),
        y1=_mm(el.get("y1")),
        x2=_mm(el.get("x2")),
        y2=_mm(el.get("y2")),
        layer=_int(el.get("layer")),
        width=_mm(el.get("width")),
    )


# -- libraries --------------------------------------------------------------


def _package(el: ET.Element) -> Package:
    pkg = Package(
        name=el.get("name", ""),
        smds=tuple(
            Smd(
                name=s.get("name", ""),
                x=_mm(s.get("x")),
                y=_mm(s.get("y")),
                dx=_mm(s.get("dx")),
                dy=_mm(s.get("dy")),
                layer=_int(s.get("layer"), 1),
            )
            for s in el.findall("smd")
        ),
        pads=tuple(
            ThruPad(
                name=p.get("name", ""),
                x=_mm(p.get("x")),
                y=_mm(p.get("y")),
                drill=_mm(p.get("drill")),
            )
            for p in el.findall("pad")
        ),
        texts=tuple(_text(t) for t in el.findall("text")),
        wires=tuple(_wire(w) for w in el.findall("wire")),
    )
    names = [p.name for p in pkg.smds] + [p.name for p in pkg.pads]
    if len(names) != len(set(names)):
        dup = next(n for n in names if names.count(n) > 1)
        raise DuplicateName(f"pad in package {pkg.name}", dup)
    return pkg


def _symbol(el: ET.Element) -> Symbol:
    sym = Symbol(
        name=el.get("name", ""),
        pins=tuple(
            Pin(
                name=p.get("name", ""),
                x=_mm(p.get("x")),
                y=_mm(p.get("y")),
                direction=p.get("direction", "io"),
                visible=p.get("visible", "both") != "off",
            )
            for p in el.findall("pin")
        ),
    )
    _unique(sym.pins, f"pin in symbol {sym.name}")
    return sym


def _deviceset(el: ET.Element) -> DeviceSet:
    gates = tuple(
        Gate(g.get("name", ""), g.get("symbol", ""), _mm(g.get("x")), _mm(g.get("y")))
        for g in el.findall("gates/gate")
    )
    devices = []
    for d in el.findall("devices/device"):
        connects = tuple(
            Connect(c.get("gate", ""), c.get("pin", ""), tuple(c.get("pad", "").split()))
            for c in d.findall("connects/connect")
        )
        devices.append(Device(d.get("name", ""), d.get("package") or None, connects))
    ds = DeviceSet(
        name=el.get("name", ""),
        prefix=el.get("prefix", ""),
        uservalue=_yes(el.get("uservalue")),
        gates=gates,
        devices=tuple(devices),
    )
    _unique(ds.gates, f"gate in deviceset {ds.name}")
    _unique(ds.devices, f"device in deviceset {ds.name}")
    return ds


def _library(el: ET.Element, name: Optional[str] = None) -> LibraryDoc:
    packages = [_package(p) for p in el.findall("packages/package")]
    symbols = [_symbol(s) for s in el.findall("symbols/symbol")]
    devicesets = [_deviceset(d) for d in el.findall("devicesets/deviceset")]
    _unique(packages, "package")
    _unique(symbols, "symbol")
    _unique(devicesets, "deviceset")
    lib = LibraryDoc(
        name=name if name is not None else el.get("name", ""),
        packages=MappingProxyType({p.name: p for p in packages}),
        symbols=MappingProxyType({s.name: s for s in symbols}),
        devicesets=MappingProxyType({d.name: d for d in devicesets}),
    )
    _check_library(lib)
    return lib


def _check_library(lib: LibraryDoc) -> None:
    for ds in lib.devicesets.values():
        for gate in ds.gates:
            if gate.symbol not in lib.symbols:
                raise BrokenReference(
                    gate.symbol, f"gate {ds.name}/{gate.name} uses an unknown symbol"
                )
        for dev in ds.devices:
            if dev.package is None:
                if dev.connects:
                    raise BrokenReference(
                        f"{ds.name}/{dev.name}", "virtual device cannot have connects"
                    )
                continue
            package = lib.packages.get(dev.package)
            if package is None:
                raise BrokenReference(
                    dev.package, f"device {ds.name}/{dev.name} uses an unknown package"
                )
            pads = package.pad_names()
            for c in dev.connects:
                gate = ds.gate(c.gate)
                if gate is None:
                    raise BrokenReference(
                        c.gate, f"connect in {ds.name}/{dev.name} names an unknown gate"
                    )
                if lib.symbols[gate.symbol].pin(c.pin) is None:
                    raise BrokenReference(
                        f"{c.gate}.{c.pin}",
                        f"connect in {ds.name}/{dev.name} names an unknown pin",
                    )
                for pad in c.pads:
                    if pad not in pads:
                        raise BrokenReference(
                            pad,
                            f"connect {c.gate}.{c.pin} in {ds.name}/{dev.name} "
                            f"names a pad missing from package {package.name}",
                        )


def _embedded(container: Optional[ET.Element]) -> MappingProxyType:
    libs = {}
    if container is not None:
        for el in container.findall("libraries/library"):
            lib = _library(el)
            if lib.name in libs:
                raise DuplicateName("library", lib.name)
            libs[lib.name] = lib
    return MappingProxyType(libs)


def parse_library(data: Union[bytes, str]) -> LibraryDoc:
    root = _root(data, NotALibrary)
    el = _drawing_child(root, "library")
    if el is None:
        raise NotALibrary("document has no <library> section")
    lib = _library(el, name=el.get("name", ""))
    return LibraryDoc(
        name=lib.name,
        packages=lib.packages,
        symbols=lib.symbols,
        devicesets=lib.devicesets,
        version=root.get("version", ""),
    )


# -- schematics -------------------------------------------------------------


def _part(el: ET.Element) -> Part:
    return Part(
        name=el.get("name", ""),
        library=el.get("library", ""),
        deviceset=el.get("deviceset", ""),
        device=el.get("device", ""),
        value=el.get("value"),
        attributes=MappingProxyType(
            {a.get("name", ""): a.get("value", "") for a in el.findall("attribute")}
        ),
    )


def _sheet(el: ET.Element) -> Sheet:
    instances = tuple(
        Instance(
            part=i.get("part", ""),
            gate=i.get("gate", ""),
            x=_mm(i.get("x")),
            y=_mm(i.get("y")),
            rotation=parse_rotation(i.get("rot")),
        )
        for i in el.findall("instances/instance")
    )
    nets = []
    for n in el.findall("nets/net"):
        segments = tuple(
            Segment(
                pinrefs=tuple(
                    PinRef(p.get("part", ""), p.get("gate", ""), p.get("pin", ""))
                    for p in s.findall("pinref")
                ),
                labels=tuple((_mm(lb.get("x")), _mm(lb.get("y"))) for lb in s.findall("label")),
                wires=tuple(_wire(w) for w in s.findall("wire")),
            )
            for s in n.findall("segment")
        )
        nets.append(Net(n.get("name", ""), _int(n.get("class")), segments))
    return Sheet(
        instances=instances,
        nets=tuple(nets),
        texts=tuple(_text(t) for t in el.findall("plain/text")),
        plain_wires=tuple(_wire(w) for w in el.findall("plain/wire")),
    )


def _check_schematic(sch: SchematicDoc) -> None:
    for part in sch.parts:
        if not part.name:
            raise BrokenReference("", "part without a name")
        lib = sch.embedded_libraries.get(part.library)
        if lib is None:
            raise BrokenReference(part.library, f"part {part.name} uses an unknown library")
        ds = lib.devicesets.get(part.deviceset)
        if ds is None:
            raise BrokenReference(
                part.deviceset, f"part {part.name} uses an unknown deviceset"
            )
        if ds.device(part.device) is None:
            raise BrokenReference(
                f"{part.deviceset}/{part.device}", f"part {part.name} uses an unknown device"
            )
    owner: dict[PinRef, str] = {}
    for sheet in sch.sheets:
        for inst in sheet.instances:
            part = sch.part(inst.part)
            if part is None:
                raise BrokenReference(inst.part, "instance of an unknown part")
            if sch.deviceset_of(part).gate(inst.gate) is None:
                raise BrokenReference(
                    f"{inst.part}.{inst.gate}", "instance of an unknown gate"
                )
        for net in sheet.nets:
            for ref in net.pinrefs:
                if sch.part(ref.part) is None:
                    raise BrokenReference(ref.part, f"pinref in net {net.name} names an unknown part")
                if not sch.has_pin(ref.part, ref.gate, ref.pin):
                    raise BrokenReference(
                        f"{ref.part}.{ref.gate}.{ref.pin}",
                        f"pinref in net {net.name} names an unknown gate or pin",
                    )
                previous = owner.setdefault(ref, net.name)
                if previous != net.name:
                    raise ConflictingConnection(
                        f"pin {ref.part}.{ref.gate}.{ref.pin} is on nets "
                        f"{previous!r} and {net.name!r}"
                    )


def parse_schematic(data: Union[bytes, str]) -> SchematicDoc:
    root = _root(data, NotASchematic)
    el = _drawing_child(root, "schematic")
    if el is None:
        raise NotASchematic("document has no <schematic> section")
    parts = tuple(_part(p) for p in el.findall("parts/part"))
    _unique(parts, "part")
    sch = SchematicDoc(
        version=root.get("version", ""),
        embedded_libraries=_embedded(el),
        parts=parts,
        sheets=tuple(_sheet(s) for s in el.findall("sheets/sheet")),
    )
    _check_schematic(sch)
    return sch


# -- boards -----------------------------------------------------------------


def _via_span(extent: Optional[str]) -> tuple[int, int]:
    if not extent:
        return 1, 16
    first, _, last = extent.partition("-")
    return int(first), int(last or first)


def _signal(el: ET.Element) -> Signal:
    return Signal(
        name=el.get("name", ""),
        contactrefs=tuple(
            ContactRef(c.get("element", ""), c.get("pad", "")) for c in el.findall("contactref")
        ),
        wires=tuple(_wire(w) for w in el.findall("wire")),
        vias=tuple(
            Via(
                _mm(v.get("x")),
                _mm(v.get("y")),
                *_via_span(v.get("extent")),
                drill=_mm(v.get("drill")),
            )
            for v in el.findall("via")
        ),
    )


def _check_board(brd: BoardDoc) -> None:
    for e in brd.elements:
        lib = brd.embedded_libraries.get(e.library)
        if lib is None:
            raise BrokenReference(e.library, f"element {e.name} uses an unknown library")
        if e.package not in lib.packages:
            raise BrokenReference(e.package, f"element {e.name} uses an unknown package")
    for sig in brd.signals:
        for ref in sig.contactrefs:
            element = brd.element(ref.element)
            if element is None:
                raise BrokenReference(ref.element, f"contactref in signal {sig.name}")
            if ref.pad not in brd.package_of(element).pad_names():
                raise BrokenReference(
                    f"{ref.element}:{ref.pad}", f"contactref in signal {sig.name} names a missing pad"
                )


def parse_board(data: Union[bytes, str]) -> BoardDoc:
    root = _root(data, NotABoard)
    el = _drawing_child(root, "board")
    if el is None:
        raise NotABoard("document has no <board> section")
    elements = tuple(
        Element(
            name=e.get("name", ""),
            library=e.get("library", ""),
            package=e.get("package", ""),
            value=e.get("value", ""),
            x=_mm(e.get("x")),
            y=_mm(e.get("y")),
            rotation=parse_rotation(e.get("rot")),
        )
        for e in el.findall("elements/element")
    )
    _unique(elements, "element")
    signals = tuple(_signal(s) for s in el.findall("signals/signal"))
    _unique(signals, "signal")
    plain = el.findall("plain/wire")
    brd = BoardDoc(
        version=root.get("version", ""),
        embedded_libraries=_embedded(el),
        elements=elements,
        signals=signals,
        outline_wires=tuple(_wire(w) for w in plain if _int(w.get("layer")) == OUTLINE_LAYER),
        texts=tuple(_text(t) for t in el.findall("plain/text")),
    )
    _check_board(brd)
    return brd


def document_kind(data: Union[bytes, str]) -> str:
    """Return "schematic", "board" or "library" judging by content alone."""
    root = _root(data)
    for kind in ("schematic", "board", "library"):
        if _drawing_child(root, kind) is not None:
            return kind
    raise UnknownDocument("no <schematic>, <board> or <library> section under <drawing>")


def parse_document(data: Union[bytes, str]) -> Document:
    kind = document_kind(data)
    return {"schematic": parse_schematic, "board": parse_board, "library": parse_library}[kind](data)
