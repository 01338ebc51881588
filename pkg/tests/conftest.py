from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Callable

import pytest

from pcblint.eagle import parse_board, parse_library, parse_schematic

FIXTURES = Path(__file__).parent / "fixtures"

EMPTY_SCH = b"""<?xml version="1.0"?>
<eagle version="9.6.2"><drawing><schematic><libraries/><parts/>
<sheets><sheet><instances/><nets/></sheet></sheets></schematic></drawing></eagle>"""


def fixture_bytes(name: str) -> bytes:
    return (FIXTURES / name).read_bytes()


def edit_xml(data: bytes, fn: Callable[[ET.Element], None]) -> bytes:
    root = ET.fromstring(data)
    fn(root)
    return ET.tostring(root, encoding="utf-8")


# -- schematic edits ---------------------------------------------------------


def _nets(root: ET.Element) -> list[ET.Element]:
    return root.findall(".//sheet/nets/net")


def find_pinref(root, part, pin):
    for net in _nets(root):
        for seg in net.findall("segment"):
            for ref in seg.findall("pinref"):
                if ref.get("part") == part and ref.get("pin") == pin:
                    return net, seg, ref
    raise KeyError((part, pin))


def prune_nets(root) -> None:
    for nets in root.findall(".//sheet/nets"):
        for net in list(nets):
            for seg in list(net.findall("segment")):
                if seg.find("pinref") is None:
                    net.remove(seg)
            if net.find("segment") is None:
                nets.remove(net)


def drop_part(root, name: str) -> None:
    parts = root.find(".//parts")
    parts.remove(next(p for p in parts if p.get("name") == name))
    for insts in root.findall(".//instances"):
        for inst in list(insts):
            if inst.get("part") == name:
                insts.remove(inst)
    for net in _nets(root):
        for seg in net.findall("segment"):
            for ref in list(seg.findall("pinref")):
                if ref.get("part") == name:
                    seg.remove(ref)
    prune_nets(root)


def drop_pinref(root, part: str, pin: str) -> None:
    _, seg, ref = find_pinref(root, part, pin)
    seg.remove(ref)
    prune_nets(root)


def move_pinref(root, part: str, pin: str, to_net: str) -> None:
    _, seg, ref = find_pinref(root, part, pin)
    seg.remove(ref)
    target = next(n for n in _nets(root) if n.get("name") == to_net)
    target.find("segment").append(ref)
    prune_nets(root)


def set_part_attr(root, part: str, key: str, value) -> None:
    el = next(p for p in root.iter("part") if p.get("name") == part)
    if value is None:
        el.attrib.pop(key, None)
    else:
        el.set(key, value)


def add_package_text(root, package: str, text: str, layer: str = "25") -> None:
    pkg = next(p for p in root.iter("package") if p.get("name") == package)
    el = ET.SubElement(pkg, "text", x="0", y="3", size="1.27", layer=layer)
    el.text = text


# -- board edits -------------------------------------------------------------


def set_outline(root, width: float, height: float) -> None:
    plain = root.find(".//board/plain")
    for w in [w for w in plain.findall("wire") if w.get("layer") == "20"]:
        plain.remove(w)
    corners = [(0, 0), (width, 0), (width, height), (0, height)]
    for (x1, y1), (x2, y2) in zip(corners, corners[1:] + corners[:1]):
        ET.SubElement(plain, "wire", x1=str(x1), y1=str(y1), x2=str(x2), y2=str(y2),
                      width="0", layer="20")


def move_element(root, name: str, x: float, y: float) -> None:
    el = next(e for e in root.iter("element") if e.get("name") == name)
    el.set("x", str(x))
    el.set("y", str(y))


def set_signal_wire_layer(root, signal: str, index: int, layer: int) -> None:
    sig = next(s for s in root.iter("signal") if s.get("name") == signal)
    sig.findall("wire")[index].set("layer", str(layer))


# -- pytest fixtures -----------------------------------------------------------


@pytest.fixture(scope="session")
def blinky_sch_bytes() -> bytes:
    return fixture_bytes("blinky.sch")


@pytest.fixture(scope="session")
def blinky_brd_bytes() -> bytes:
    return fixture_bytes("blinky.brd")


@pytest.fixture(scope="session")
def blinky_sch(blinky_sch_bytes):
    return parse_schematic(blinky_sch_bytes)


@pytest.fixture(scope="session")
def blinky_brd(blinky_brd_bytes):
    return parse_board(blinky_brd_bytes)


@pytest.fixture(scope="session")
def resistor_lbr():
    return parse_library(fixture_bytes("resistor.lbr"))
