"""Chainable selectors over parsed Eagle documents.

    >>> From(sch).sheets().texts().with_layer("tNames").without_text(">NAME").count()

Every step returns a new :class:`Selection`; documents are never touched.
Asking for a step that makes no sense for the current kind raises
:class:`KindMismatch` instead of quietly returning nothing.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Any, Callable, Iterable, Optional, Union

from .eagle import BoardDoc, LibraryDoc, SchematicDoc, layer_number
from .netlist import PinInstance


class KindMismatch(TypeError):
    pass


@lru_cache(maxsize=512)
def _glob_regex(pattern: str) -> re.Pattern:
    out = []
    for ch in pattern:
        if ch == "*":
            out.append(".*")
        elif ch == "?":
            out.append(".")
        else:
            out.append(re.escape(ch))
    return re.compile("".join(out), re.DOTALL)


def glob_match(pattern: str, text: Optional[str]) -> bool:
    """Case-sensitive match where ``*`` is any run and ``?`` one character."""
    return _glob_regex(pattern).fullmatch(text or "") is not None


def _doc_kind(doc: Any) -> str:
    if isinstance(doc, SchematicDoc):
        return "schematic"
    if isinstance(doc, BoardDoc):
        return "board"
    if isinstance(doc, LibraryDoc):
        return "library"
    raise KindMismatch(f"cannot query a {type(doc).__name__}")


def _embedded_packages(doc: Union[SchematicDoc, BoardDoc]) -> list:
    return [p for lib in doc.embedded_libraries.values() for p in lib.packages.values()]


def _part_pins(doc: SchematicDoc, part) -> list[PinInstance]:
    lib = doc.embedded_libraries[part.library]
    return [
        PinInstance(part.name, g.name, pin.name)
        for g in doc.deviceset_of(part).gates
        for pin in lib.symbols[g.symbol].pins
    ]


# (current kind, step) -> (new kind, children of one item)
_NAVIGATION: dict[tuple[str, str], tuple[str, Callable]] = {
    ("schematic", "sheets"): ("sheets", lambda d, doc: d.sheets),
    ("schematic", "parts"): ("parts", lambda d, doc: d.parts),
    ("schematic", "packages"): ("packages", lambda d, doc: _embedded_packages(d)),
    ("board", "elements"): ("elements", lambda d, doc: d.elements),
    ("board", "signals"): ("signals", lambda d, doc: d.signals),
    ("board", "packages"): ("packages", lambda d, doc: _embedded_packages(d)),
    ("board", "texts"): ("texts", lambda d, doc: d.texts),
    ("library", "packages"): ("packages", lambda d, doc: list(d.packages.values())),
    ("sheets", "instances"): ("instances", lambda s, doc: s.instances),
    ("sheets", "nets"): ("nets", lambda s, doc: s.nets),
    ("sheets", "texts"): ("texts", lambda s, doc: s.texts),
    ("packages", "texts"): ("texts", lambda p, doc: p.texts),
    ("parts", "pins"): ("pins", lambda p, doc: _part_pins(doc, p)),
    ("instances", "pins"): (
        "pins",
        lambda i, doc: [p for p in _part_pins(doc, doc.part(i.part)) if p.gate == i.gate],
    ),
    ("nets", "pins"): ("pins", lambda n, doc: [PinInstance(r.part, r.gate, r.pin) for r in n.pinrefs]),
}


def _name(kind: str, item: Any) -> Optional[str]:
    if kind == "instances":
        return item.part
    if kind == "pins":
        return item.pin
    return item.name


def _deviceset(kind: str, item: Any, doc: Any) -> str:
    if kind == "instances":
        return doc.part(item.part).deviceset
    return item.deviceset


# filter -> kinds it accepts
_FILTER_KINDS = {
    "with_layer": {"texts"},
    "without_text": {"texts"},
    "with_text": {"texts"},
    "with_name": {"parts", "instances", "nets", "pins", "packages", "elements", "signals"},
    "with_value": {"parts", "elements"},
    "with_deviceset": {"parts", "instances"},
    "with_attribute": {"parts"},
}


class Selection:
    """An ordered, homogeneous list of design objects plus their source document."""

    __slots__ = ("kind", "items", "source")

    def __init__(self, kind: str, items: Iterable[Any], source: Any):
        self.kind = kind
        self.items = tuple(items)
        self.source = source

    def __repr__(self) -> str:
        return f"<Selection {self.kind} x{len(self.items)}>"

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def _navigate(self, step: str) -> "Selection":
        try:
            kind, children = _NAVIGATION[(self.kind, step)]
        except KeyError:
            raise KindMismatch(f"{step}() is not defined on {self.kind}") from None
        return Selection(
            kind, [c for item in self.items for c in children(item, self.source)], self.source
        )

    def sheets(self) -> "Selection":
        return self._navigate("sheets")

    def parts(self) -> "Selection":
        return self._navigate("parts")

    def instances(self) -> "Selection":
        return self._navigate("instances")

    def nets(self) -> "Selection":
        return self._navigate("nets")

    def texts(self) -> "Selection":
        return self._navigate("texts")

    def pins(self) -> "Selection":
        return self._navigate("pins")

    def packages(self) -> "Selection":
        return self._navigate("packages")

    def elements(self) -> "Selection":
        return self._navigate("elements")

    def signals(self) -> "Selection":
        return self._navigate("signals")

    # short aliases
    get_sheets = sheets
    get_text = texts

    def _filter(self, name: str, keep: Callable[[Any], bool]) -> "Selection":
        if self.kind not in _FILTER_KINDS[name]:
            raise KindMismatch(f"{name}() is not defined on {self.kind}")
        return Selection(self.kind, [i for i in self.items if keep(i)], self.source)

    def with_layer(self, layer: Union[int, str]) -> "Selection":
        number = layer_number(layer)
        return self._filter("with_layer", lambda t: t.layer == number)

    def with_text(self, pattern: str) -> "Selection":
        return self._filter("with_text", lambda t: glob_match(pattern, t.content))

    def without_text(self, pattern: str) -> "Selection":
        return self._filter("without_text", lambda t: not glob_match(pattern, t.content))

    def with_name(self, pattern: str) -> "Selection":
        return self._filter("with_name", lambda i: glob_match(pattern, _name(self.kind, i)))

    def with_value(self, pattern: str) -> "Selection":
        return self._filter("with_value", lambda i: glob_match(pattern, i.value))

    def with_deviceset(self, pattern: str) -> "Selection":
        return self._filter(
            "with_deviceset",
            lambda i: glob_match(pattern, _deviceset(self.kind, i, self.source)),
        )

    def with_attribute(self, attribute: str, pattern: str) -> "Selection":
        return self._filter(
            "with_attribute",
            lambda p: attribute in p.attributes and glob_match(pattern, p.attributes[attribute]),
        )

    def matching(self, predicate: Callable[[Any], bool]) -> "Selection":
        return Selection(self.kind, [i for i in self.items if predicate(i)], self.source)

    def count(self) -> int:
        return len(self.items)

    def first(self) -> Optional[Any]:
        return self.items[0] if self.items else None

    def collect(self) -> list:
        return list(self.items)


def From(doc: Union[SchematicDoc, BoardDoc, LibraryDoc]) -> Selection:
    return Selection(_doc_kind(doc), [doc], doc)


select = From
