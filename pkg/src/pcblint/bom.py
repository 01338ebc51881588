"""Combined bills of material across several schematics."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable

from .eagle import SchematicDoc

CSV_HEADER = ("library", "deviceset", "device", "value", "qty", "refs")


@dataclass(frozen=True)
class BomLine:
    library: str
    deviceset: str
    device: str
    value: str
    refs: tuple[tuple[str, str], ...]

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.library, self.deviceset, self.device, self.value)

    @property
    def quantity(self) -> int:
        return len(self.refs)


def generate_bom(designs: Iterable[tuple[str, SchematicDoc]]) -> list[BomLine]:
    """One line per (library, deviceset, device, value), sorted by that key.

    Virtual parts (devices without a package, e.g. frames) are not ordered
    and so are left out.
    """
    grouped: dict[tuple[str, str, str, str], list[tuple[str, str]]] = {}
    for design, sch in designs:
        for part in sch.parts:
            device = sch.device_of(part)
            if device is None or device.package is None:
                continue
            key = (part.library, part.deviceset, part.device, part.value or "")
            grouped.setdefault(key, []).append((design, part.name))
    return [BomLine(*key, refs=tuple(sorted(refs))) for key, refs in sorted(grouped.items())]


def bom_csv(lines: Iterable[BomLine]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for line in lines:
        refs = ";".join(f"{design}/{part}" for design, part in line.refs)
        writer.writerow([*line.key, line.quantity, refs])
    return buf.getvalue()
