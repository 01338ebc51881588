"""Random schematic generator and brute-force oracles for the tests.

The oracles work on raw XML text (regex tag scans) so they share no code
with the parser, netlist builder or pattern matcher they check.
"""

from __future__ import annotations

import random
import re
from fnmatch import fnmatchcase
from html import escape, unescape

# deviceset name -> (gates, pin count per gate)
DEVICESETS = {
    "D1P": (("G$1",), 1),
    "D2P": (("G$1",), 2),
    "RES": (("G$1",), 2),
    "D3P": (("G$1",), 3),
    "D4P": (("G$1",), 4),
    "DUAL": (("A", "B"), 2),
}
NET_POOL = ["N$1", "N$2", "N$3", "GND", "VCC", "SIG", "CLK", "D0", "D1", "A?", "X", "Y"]
VALUES = [None, "1k", "10k", "100n"]


def _library_xml() -> str:
    symbols, packages, devicesets = [], [], []
    for n in range(1, 5):
        pins = "".join(f'<pin name="P{i}" x="{i * 2.54}" y="0"/>' for i in range(1, n + 1))
        symbols.append(f'<symbol name="S{n}">{pins}</symbol>')
    for name, (gates, n) in DEVICESETS.items():
        pads = [f"{g}{i}" for g in gates for i in range(1, n + 1)]
        smds = "".join(f'<smd name="{p}" x="0" y="0" dx="1" dy="1" layer="1"/>' for p in pads)
        packages.append(f'<package name="PK{name}">{smds}</package>')
        gate_xml = "".join(f'<gate name="{g}" symbol="S{n}" x="0" y="0"/>' for g in gates)
        connects = "".join(
            f'<connect gate="{g}" pin="P{i}" pad="{g}{i}"/>' for g in gates for i in range(1, n + 1)
        )
        devicesets.append(
            f'<deviceset name="{name}" prefix="X"><gates>{gate_xml}</gates><devices>'
            f'<device name="" package="PK{name}"><connects>{connects}</connects></device>'
            f"</devices></deviceset>"
        )
    return (
        '<library name="gen"><packages>' + "".join(packages) + "</packages><symbols>"
        + "".join(symbols) + "</symbols><devicesets>" + "".join(devicesets)
        + "</devicesets></library>"
    )


LIBRARY_XML = _library_xml()


def random_schematic(rng: random.Random, max_parts=8, max_nets=12, max_sheets=2) -> bytes:
    n_sheets = rng.randint(1, max_sheets)
    parts = []
    for i in range(rng.randint(0, max_parts)):
        parts.append((f"P{i}", rng.choice(sorted(DEVICESETS)), rng.choice(VALUES)))
    net_names = rng.sample(NET_POOL, rng.randint(0, max_nets))

    # sheet -> list of (part, gate); a gate may also stay unplaced
    placed = {s: [] for s in range(n_sheets)}
    for name, ds, _ in parts:
        for gate in DEVICESETS[ds][0]:
            if rng.random() < 0.9:
                placed[rng.randrange(n_sheets)].append((name, gate))

    sheet_xml = []
    for s in range(n_sheets):
        nets: dict[str, list[list[str]]] = {}
        names_here = [n for n in net_names if rng.random() < 0.7]
        for n in names_here:
            nets[n] = [[]]
        for part, gate in placed[s]:
            ds = next(p[1] for p in parts if p[0] == part)
            for i in range(1, DEVICESETS[ds][1] + 1):
                if names_here and rng.random() < 0.65:
                    segs = nets[rng.choice(names_here)]
                    if rng.random() < 0.25:
                        segs.append([])
                    ref = f'<pinref part="{part}" gate="{gate}" pin="P{i}"/>'
                    rng.choice(segs).append(ref)
        instances = "".join(
            f'<instance part="{p}" gate="{g}" x="{rng.randint(0, 40) * 2.54:.2f}" y="0"/>'
            for p, g in placed[s]
        )
        net_xml = "".join(
            f'<net name="{escape(n)}" class="0">'
            + "".join(f"<segment>{''.join(seg)}</segment>" for seg in segs)
            + "</net>"
            for n, segs in nets.items()
        )
        sheet_xml.append(f"<sheet><instances>{instances}</instances><nets>{net_xml}</nets></sheet>")

    part_xml = "".join(
        f'<part name="{n}" library="gen" deviceset="{ds}" device=""'
        + (f' value="{v}"' if v is not None else "")
        + "/>"
        for n, ds, v in parts
    )
    return (
        '<?xml version="1.0" encoding="utf-8"?>\n<eagle version="9.6.2"><drawing><schematic>'
        f"<libraries>{LIBRARY_XML}</libraries><parts>{part_xml}</parts>"
        f"<sheets>{''.join(sheet_xml)}</sheets></schematic></drawing></eagle>"
    ).encode()


# -- oracles -----------------------------------------------------------------

_ATTR = re.compile(r'(\w+)="([^"]*)"')


def _attrs(tag: str) -> dict[str, str]:
    return {k: unescape(v) for k, v in _ATTR.findall(tag)}


def scan_pinrefs(xml: bytes) -> tuple[list[str], list[tuple[str, str, str, str]]]:
    """Net names and (net, part, gate, pin) tuples, straight from the text."""
    text = xml.decode()
    names, refs = [], []
    for m in re.finditer(r"<net\b([^>]*)>(.*?)</net>", text, re.S):
        net = _attrs(m.group(1))["name"]
        names.append(net)
        for ref in re.findall(r"<pinref\b[^>]*/>", m.group(2)):
            a = _attrs(ref)
            refs.append((net, a["part"], a["gate"], a["pin"]))
    return names, refs


class UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def oracle_nets(xml: bytes) -> dict[str, frozenset[tuple[str, str, str]]]:
    names, refs = scan_pinrefs(xml)
    uf = UnionFind()
    for n in names:
        uf.find(("net", n))
    for net, part, gate, pin in refs:
        uf.union(("pin", part, gate, pin), ("net", net))
    groups: dict = {}
    for node in list(uf.parent):
        groups.setdefault(uf.find(node), set()).add(node)
    out = {}
    for members in groups.values():
        nets = [n[1] for n in members if n[0] == "net"]
        pins = frozenset(n[1:] for n in members if n[0] == "pin")
        for n in nets:
            out[n] = pins
    return out


def scan_parts(xml: bytes) -> dict[str, dict[str, str]]:
    text = xml.decode()
    return {a["name"]: a for a in map(_attrs, re.findall(r"<part\b[^>]*/?>", text))}


def oracle_paths(xml: bytes, hops: int, trailing_net: bool) -> list[tuple]:
    """Every structural path with ``hops`` net crossings.

    A path is part, pin, net, pin, part, pin, net, ... and may not bind a
    part twice or leave a part on the net it arrived by.
    """
    nets = oracle_nets(xml)
    pin_net = {pin: n for n, pins in nets.items() for pin in pins}
    pins_of: dict[str, list] = {}
    for pin in pin_net:
        pins_of.setdefault(pin[0], []).append(pin)
    out = []

    def extend(path, used, arrived, hops_left):
        part = path[-1]
        for pin in pins_of.get(part, []):
            net = pin_net[pin]
            if net == arrived:
                continue
            if hops_left == 1 and trailing_net:
                out.append(tuple(path + [pin, net]))
                continue
            for other in nets[net]:
                if other[0] in used:
                    continue
                nxt = path + [pin, net, other, other[0]]
                if hops_left == 1:
                    out.append(tuple(nxt))
                else:
                    extend(nxt, used | {other[0]}, net, hops_left - 1)

    for part in scan_parts(xml):
        extend([part], {part}, None, hops)
    return out


def path_fits(path: tuple, steps: list[tuple[str, object]], parts: dict) -> bool:
    """Filter one structural path through pattern steps given as plain data."""
    for item, (kind, want) in zip(path, steps):
        if kind == "part":
            attrs = parts[item]
            for key, glob in want.items():
                if not fnmatchcase(attrs.get(key, ""), glob):
                    return False
        elif kind == "pin":
            if not fnmatchcase(item[2], want):
                return False
        elif not fnmatchcase(item, want):
            return False
    return True


def random_pattern(rng: random.Random, xml: bytes) -> tuple[str, list, int, bool]:
    """Pattern text plus the same pattern as plain data for ``path_fits``."""
    parts = scan_parts(xml)
    names, refs = scan_pinrefs(xml)
    hops = rng.randint(1, 3)
    trailing = rng.random() < 0.3

    def glob_from(pool):
        if not pool or rng.random() < 0.5:
            return "*"
        s = rng.choice(sorted(pool))
        r = rng.random()
        if r < 0.3 and len(s) > 1:
            return s[:-1] + "?"
        if r < 0.5:
            return s[0] + "*"
        return s

    def part_step():
        want = {}
        for key, pool in (
            ("name", parts),
            ("deviceset", {p["deviceset"] for p in parts.values()}),
            ("value", {p.get("value", "") for p in parts.values()} - {""}),
        ):
            if rng.random() < 0.35:
                want[key] = glob_from(pool)
        return want

    pins = {r[3] for r in refs} or {"P1"}
    steps = [("part", part_step())]
    for h in range(hops):
        steps.append(("pin", glob_from(pins)))
        steps.append(("net", glob_from(set(names))))
        if h == hops - 1 and trailing:
            break
        steps.append(("pin", glob_from(pins)))
        steps.append(("part", part_step()))

    # half the time, aim at a path that exists and loosen some of its steps
    if rng.random() < 0.5:
        for h in range(hops, 0, -1):
            paths = oracle_paths(xml, h, trailing)
            if paths:
                hops = h
                break
        else:
            paths = []
        if paths:
            steps = []
            for i, item in enumerate(rng.choice(sorted(paths))):
                if i % 4 == 0:
                    steps.append(("part", {"name": item} if rng.random() < 0.5 else part_step()))
                elif i % 2 == 1:
                    steps.append(("pin", item[2] if rng.random() < 0.6 else glob_from(pins)))
                else:
                    steps.append(("net", item if rng.random() < 0.6 else glob_from(set(names))))

    text = []
    for kind, want in steps:
        if kind == "part":
            text.append("part(" + ",".join(f'{k}="{v}"' for k, v in want.items()) + ")")
        else:
            text.append(f'{kind}("{want}")')
    return " ".join(text), steps, hops, trailing
