"""Eagle's standard layer numbers and names."""

from __future__ import annotations

from typing import Union

LAYER_NAMES: dict[int, str] = {
    1: "Top",
    **{n: f"Route{n}" for n in range(2, 16)},
    16: "Bottom",
    17: "Pads",
    18: "Vias",
    19: "Unrouted",
    20: "Dimension",
    21: "tPlace",
    22: "bPlace",
    25: "tNames",
    26: "bNames",
    27: "tValues",
    28: "bValues",
    29: "tStop",
    30: "bStop",
    31: "tCream",
    32: "bCream",
    39: "tKeepout",
    40: "bKeepout",
    41: "tRestrict",
    42: "bRestrict",
    43: "vRestrict",
    44: "Drills",
    45: "Holes",
    46: "Milling",
    51: "tDocu",
    52: "bDocu",
    91: "Nets",
    92: "Busses",
    93: "Pins",
    94: "Symbols",
    95: "Names",
    96: "Values",
    97: "Info",
    98: "Guide",
}
LAYER_NUMBERS: dict[str, int] = {name: num for num, name in LAYER_NAMES.items()}

TNAMES = 25
DIMENSION = 20
COPPER = frozenset(range(1, 17))


def layer_number(layer: Union[int, str]) -> int:
    """Accept a layer number or a standard layer name."""
    if isinstance(layer, int):
        return layer
    if layer.isdigit():
        return int(layer)
    try:
        return LAYER_NUMBERS[layer]
    except KeyError:
        raise ValueError(f"unknown layer {layer!r}") from None
