"""Stable text paths naming the object a finding is about.

``locator(*chain)`` takes the object and, where position matters, its
ancestors from outermost to innermost::

    locator(part)                          -> "part:R1"
    locator(package, text)                 -> "package:P/text:2"
    locator(sch, sheet, net, pinref)       -> "sheet:0/net:N$1/pinref:U1.G$1.PB5"
    locator(sch, lib, package, text)       -> "library:blinky/package:P/text:2"

A document at the head of the chain only serves to index its children.
Indices are zero-based document order and found by identity, so two equal
objects in one container still get distinct locators.
"""

from __future__ import annotations

from typing import Any

from ..eagle import (
    BoardDoc,
    Element,
    Instance,
    LibraryDoc,
    Net,
    Package,
    Part,
    PinRef,
    SchematicDoc,
    Sheet,
    Signal,
    TextItem,
    Via,
    Wire,
)
from ..netlist import ElectricalNet, PinInstance


def _index(container: Any, attr: str, item: Any) -> int:
    for i, candidate in enumerate(getattr(container, attr)):
        if candidate is item:
            return i
    raise ValueError(f"{type(item).__name__} is not in the given {type(container).__name__}")


def _segment(parent: Any, obj: Any) -> str:
    if isinstance(obj, Part):
        return f"part:{obj.name}"
    if isinstance(obj, PinInstance):
        return f"part:{obj.part}/gate:{obj.gate}/pin:{obj.pin}"
    if isinstance(obj, (Net, ElectricalNet)):
        return f"net:{obj.name}"
    if isinstance(obj, PinRef):
        return f"pinref:{obj.part}.{obj.gate}.{obj.pin}"
    if isinstance(obj, Instance):
        return f"instance:{obj.part}.{obj.gate}"
    if isinstance(obj, Sheet):
        return f"sheet:{_index(parent, 'sheets', obj)}"
    if isinstance(obj, LibraryDoc):
        return f"library:{obj.name}"
    if isinstance(obj, Package):
        return f"package:{obj.name}"
    if isinstance(obj, TextItem):
        return f"text:{_index(parent, 'texts', obj)}"
    if isinstance(obj, Element):
        return f"element:{obj.name}"
    if isinstance(obj, Signal):
        return f"signal:{obj.name}"
    if isinstance(obj, Wire):
        return f"wire:{_index(parent, 'wires', obj)}"
    if isinstance(obj, Via):
        return f"via:{_index(parent, 'vias', obj)}"
    raise TypeError(f"no locator for {type(obj).__name__}")


def locator(*chain: Any) -> str:
    if not chain:
        raise TypeError("locator() needs at least one object")
    parts = []
    parent = None
    for i, obj in enumerate(chain):
        is_root = i == 0 and isinstance(obj, (SchematicDoc, BoardDoc, LibraryDoc)) and len(chain) > 1
        if not is_root:
            parts.append(_segment(parent, obj))
        parent = obj
    return "/".join(parts)
