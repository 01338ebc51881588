"""Single mutations of the blinky fixture pair and the findings each must give.

Schematic mutations are checked in lab H3 (schematic alone); board
mutations in lab H4 against the clean schematic. Expected findings are
(rule_id, severity, locator) triples and must match exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from conftest import (
    add_package_text,
    drop_part,
    drop_pinref,
    find_pinref,
    move_element,
    move_pinref,
    set_outline,
    set_part_attr,
    set_signal_wire_layer,
)

U1_PIN = "part:U1/gate:G$1/pin:{}"


@dataclass(frozen=True)
class Mutation:
    name: str
    target: str  # "sch" or "brd"
    edit: Callable
    expected: frozenset


def _swap_led(root):
    _, _, a = find_pinref(root, "D1", "A")
    _, _, c = find_pinref(root, "D1", "C")
    a.set("pin", "C")
    c.set("pin", "A")


def _remove_series_resistor(root):
    drop_part(root, "R1")
    move_pinref(root, "D1", "A", "N$1")


def _ground_reset(root):
    drop_part(root, "R2")
    move_pinref(root, "U1", "RESET", "GND")


def _remove_reset_network(root):
    drop_part(root, "R2")
    drop_pinref(root, "U1", "RESET")


def _f(rule, severity, loc):
    return (rule, severity, loc)


MUTATIONS = [
    Mutation("swapped LED polarity", "sch", _swap_led,
             frozenset({_f("F1-status-led-path", "error", "part:U1")})),
    Mutation("removed series resistor", "sch", _remove_series_resistor,
             frozenset({_f("F1-status-led-path", "error", "part:U1")})),
    Mutation("grounded RESET", "sch", _ground_reset,
             frozenset({_f("F2-reset-wiring", "error", U1_PIN.format("RESET"))})),
    Mutation("removed RESET network", "sch", _remove_reset_network,
             frozenset({
                 _f("S3-dangling-pin", "warning", U1_PIN.format("RESET")),
                 _f("F2-reset-wiring", "warning", U1_PIN.format("RESET")),
             })),
    Mutation("removed decoupling cap", "sch", lambda r: drop_part(r, "C1"),
             frozenset({_f("F4-decoupling", "error", U1_PIN.format("VCC"))})),
    Mutation("VCC-GND short", "sch", lambda r: move_pinref(r, "U1", "GND", "VCC"),
             frozenset({_f("F3-power-short", "error", "net:VCC")})),
    Mutation("oversized outline", "brd", lambda r: set_outline(r, 120, 80),
             frozenset({_f("F6-board-extent", "error", "outline")})),
    Mutation("element off-board", "brd", lambda r: move_element(r, "C1", 200, 200),
             frozenset({_f("F7-elements-inside-outline", "error", "element:C1")})),
    Mutation("inner-layer misuse", "brd", lambda r: set_signal_wire_layer(r, "N$2", 0, 3),
             frozenset({_f("F8-copper-layers", "error", "signal:N$2/wire:0")})),
    Mutation("missing value", "sch", lambda r: set_part_attr(r, "R1", "value", None),
             frozenset({_f("S2-missing-value", "warning", "part:R1")})),
    Mutation("literal tNames text", "sch", lambda r: add_package_text(r, "MCU-5", "U1"),
             frozenset({_f("S1-tnames-literal", "warning", "library:blinky/package:MCU-5/text:2")})),
    Mutation("detached pin", "sch", lambda r: drop_pinref(r, "C1", "1"),
             frozenset({
                 _f("S3-dangling-pin", "warning", "part:C1/gate:G$1/pin:1"),
                 _f("F4-decoupling", "error", U1_PIN.format("VCC")),
             })),
]
