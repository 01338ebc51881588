"""Linear part-pin-net-pin-part path patterns over a netlist.

Pattern text is a whitespace separated list of steps::

    part(name=U1) pin(PB5) net(*) pin(*) part(deviceset=RESISTOR*) pin(*) net(GND)

``part(...)`` takes ``key=glob`` pairs separated by commas, with keys
``name``, ``deviceset``, ``value`` and ``attr.NAME``; ``part(*)`` and
``part()`` match any part. ``pin(glob)`` matches symbol pin names and
``net(glob)`` net names. Values may be double-quoted to hold commas,
parentheses or spaces.

Shape: ``part (pin net pin part)* [pin net]``. A pattern must cross at
least one net. The pin before and after an inner part both sit on that
part, which is how a path goes "through" a two-terminal component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .eagle import SchematicDoc
from .netlist import Netlist, PinInstance
from .query import glob_match


class PatternError(ValueError):
    pass


class PatternSyntax(PatternError):
    def __init__(self, position: int, message: str):
        super().__init__(f"at {position}: {message}")
        self.position = position


class PatternShape(PatternError):
    pass


@dataclass(frozen=True)
class PartStep:
    name: str = "*"
    deviceset: str = "*"
    value: str = "*"
    attributes: tuple[tuple[str, str], ...] = ()

    def accepts(self, sch: SchematicDoc, part_name: str) -> bool:
        part = sch.part(part_name)
        if part is None:
            return False
        if not (
            glob_match(self.name, part.name)
            and glob_match(self.deviceset, part.deviceset)
            and glob_match(self.value, part.value)
        ):
            return False
        return all(
            key in part.attributes and glob_match(pattern, part.attributes[key])
            for key, pattern in self.attributes
        )

    def __str__(self) -> str:
        args = [f"{k}={v}" for k, v in (("name", self.name), ("deviceset", self.deviceset),
                                        ("value", self.value)) if v != "*"]
        args += [f"attr.{k}={v}" for k, v in self.attributes]
        return f"part({','.join(args) or '*'})"


@dataclass(frozen=True)
class PinStep:
    glob: str

    def __str__(self) -> str:
        return f"pin({self.glob})"


@dataclass(frozen=True)
class NetStep:
    glob: str

    def __str__(self) -> str:
        return f"net({self.glob})"


Step = Union[PartStep, PinStep, NetStep]


@dataclass(frozen=True)
class PathPattern:
    steps: tuple[Step, ...]

    @property
    def parts(self) -> tuple[PartStep, ...]:
        return tuple(s for s in self.steps if isinstance(s, PartStep))

    @property
    def net_hops(self) -> int:
        return sum(isinstance(s, NetStep) for s in self.steps)

    @property
    def ends_on_net(self) -> bool:
        return isinstance(self.steps[-1], NetStep)

    def __str__(self) -> str:
        return " ".join(map(str, self.steps))


@dataclass(frozen=True, order=True)
class PatternBinding:
    """One concrete path. ``nets[i]`` joins ``parts[i]`` to ``parts[i + 1]``.

    ``pins`` lists every bound pin in path order: the exit pin of the first
    part, then enter/exit pairs of inner parts, then the enter pin of the
    last part (or the exit pin feeding a trailing net).
    """

    parts: tuple[str, ...]
    pins: tuple[PinInstance, ...]
    nets: tuple[str, ...]
    sequence: tuple = field(compare=False, default=())

    @classmethod
    def from_sequence(cls, seq: tuple) -> "PatternBinding":
        return cls(
            parts=tuple(x for i, x in enumerate(seq) if i % 4 == 0),
            pins=tuple(x for i, x in enumerate(seq) if i % 2 == 1),
            nets=tuple(x for i, x in enumerate(seq) if i % 4 == 2),
            sequence=tuple(seq),
        )

    def sort_key(self) -> tuple:
        return (self.parts, tuple((p.gate, p.pin) for p in self.pins), self.nets)

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.sequence)


# -- compiling --------------------------------------------------------------

_PART_KEYS = ("name", "deviceset", "value")


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def word(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        return self.text[start:self.pos]

    def expect(self, ch: str) -> None:
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            found = self.text[self.pos] if self.pos < len(self.text) else "end of pattern"
            raise PatternSyntax(self.pos, f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def atom(self, stops: str) -> str:
        """A bare run up to one of ``stops`` or a double-quoted string."""
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == '"':
            start = self.pos
            self.pos += 1
            out = []
            while self.pos < len(self.text) and self.text[self.pos] != '"':
                if self.text[self.pos] == "\\" and self.pos + 1 < len(self.text):
                    self.pos += 1
                out.append(self.text[self.pos])
                self.pos += 1
            if self.pos >= len(self.text):
                raise PatternSyntax(start, "unterminated quoted value")
            self.pos += 1
            self.skip_ws()
            return "".join(out)
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in stops:
            if self.text[self.pos] in '"(':
                raise PatternSyntax(self.pos, f"unexpected {self.text[self.pos]!r}")
            self.pos += 1
        return self.text[start:self.pos].strip()


def _part_step(r: _Reader) -> PartStep:
    r.skip_ws()
    if r.pos < len(r.text) and r.text[r.pos] == ")":
        return PartStep()
    fields: dict[str, str] = {}
    attrs: list[tuple[str, str]] = []
    while True:
        start = r.pos
        item = r.atom(",)=")
        if r.pos < len(r.text) and r.text[r.pos] == "=":
            r.pos += 1
            key, value = item, r.atom(",)")
            if not value:
                raise PatternSyntax(r.pos, f"empty value for {key!r}")
        elif item == "*":
            key, value = "name", "*"
        else:
            raise PatternSyntax(start, f"expected key=value, found {item!r}")
        if key.startswith("attr.") and len(key) > 5:
            attrs.append((key[5:], value))
        elif key in _PART_KEYS:
            if key in fields:
                raise PatternSyntax(start, f"repeated key {key!r}")
            fields[key] = value
        else:
            raise PatternSyntax(start, f"unknown part key {key!r}")
        if r.pos < len(r.text) and r.text[r.pos] == ",":
            r.pos += 1
            continue
        return PartStep(**fields, attributes=tuple(attrs))


def compile_pattern(text: str) -> PathPattern:
    r = _Reader(text)
    steps: list[Step] = []
    while not r.at_end():
        start = r.pos
        kind = r.word()
        if kind not in ("part", "pin", "net"):
            raise PatternSyntax(start, f"expected part(, pin( or net(, found {text[start:start + 8]!r}")
        r.expect("(")
        if kind == "part":
            steps.append(_part_step(r))
        else:
            glob = r.atom(")")
            if not glob:
                raise PatternSyntax(r.pos, f"{kind}() needs a name pattern")
            steps.append(PinStep(glob) if kind == "pin" else NetStep(glob))
        r.expect(")")
    _check_shape(steps)
    return PathPattern(tuple(steps))


# position in the 4-cycle part, pin, net, pin
_CYCLE = (PartStep, PinStep, NetStep, PinStep)


def _check_shape(steps: list[Step]) -> None:
    if not steps:
        raise PatternShape("empty pattern")
    for i, step in enumerate(steps):
        want = _CYCLE[i % 4]
        if not isinstance(step, want):
            raise PatternShape(
                f"step {i + 1} is {type(step).__name__}, expected {want.__name__}"
            )
    last = steps[-1]
    if isinstance(last, PinStep):
        raise PatternShape("pattern ends on a pin; end with a part or a net")
    if not any(isinstance(s, NetStep) for s in steps):
        raise PatternShape("pattern must cross at least one net")


# -- matching ---------------------------------------------------------------


class _Index:
    def __init__(self, nl: Netlist):
        by_part: dict[str, list[PinInstance]] = {}
        for pin in nl.pin_index:
            by_part.setdefault(pin.part, []).append(pin)
        self.pins_of_part = {k: sorted(v) for k, v in by_part.items()}
        self.members = {name: sorted(net.members) for name, net in nl.nets.items()}
        self.net_of = nl.pin_index


def _walk(
    steps: tuple[Step, ...],
    sch: SchematicDoc,
    idx: _Index,
    i: int,
    seq: list,
    used: set[str],
    prev_net: Optional[str],
) -> Iterator[tuple]:
    if i == len(steps):
        yield tuple(seq)
        return
    step = steps[i]
    phase = i % 4
    if phase == 1:  # exit pin of the part just bound
        part = seq[-1]
        for pin in idx.pins_of_part.get(part, ()):
            net = idx.net_of[pin]
            if net == prev_net or not glob_match(step.glob, pin.pin):
                continue
            if not glob_match(steps[i + 1].glob, net):
                continue
            seq += [pin, net]
            yield from _walk(steps, sch, idx, i + 2, seq, used, net)
            del seq[-2:]
    elif phase == 3:  # enter pin on the net just crossed, then its part
        part_step = steps[i + 1]
        for pin in idx.members[prev_net]:
            if pin.part in used or not glob_match(step.glob, pin.pin):
                continue
            if not part_step.accepts(sch, pin.part):
                continue
            seq += [pin, pin.part]
            used.add(pin.part)
            yield from _walk(steps, sch, idx, i + 2, seq, used, prev_net)
            used.discard(pin.part)
            del seq[-2:]
    else:  # pragma: no cover - compile_pattern forbids other layouts
        raise PatternShape(f"unexpected step {step}")


def match_pattern(nl: Netlist, sch: SchematicDoc, pat: PathPattern) -> list[PatternBinding]:
    """Every binding of ``pat``, deduplicated and in canonical order."""
    idx = _Index(nl)
    first = pat.steps[0]
    found = set()
    for part in sorted(p.name for p in sch.parts):
        if part not in idx.pins_of_part or not first.accepts(sch, part):
            continue
        for seq in _walk(pat.steps, sch, idx, 1, [part], {part}, None):
            found.add(seq)
    bindings = [PatternBinding.from_sequence(s) for s in found]
    return sorted(bindings, key=PatternBinding.sort_key)
