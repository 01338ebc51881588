"""Rule-set configuration: which rules each lab runs, with what parameters.

The file is TOML. See ``pcblint/data/default_rules.toml`` for the layout
and README.md for the full schema.
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..pattern import PatternError, compile_pattern
from .engine import DocKind, Phase, Registry, Rule, RuleContext, Severity

_DOCUMENTS = {"schematic", "board", "library"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CheckParams:
    board_max_extent: float = 100.0
    allowed_copper_layers: frozenset[int] = frozenset({1, 2, 15, 16})
    placement_grid: float = 2.54
    decoupling_cap_deviceset: str = "C*"
    power_net_names: tuple[str, ...] = ("VCC", "GND", "3V3")
    ground_net: str = "GND"
    # pwr-direction pin name -> the power net that pin must sit on
    power_pin_nets: Mapping[str, str] = field(
        default=MappingProxyType({"VCC": "VCC", "GND": "GND"}), hash=False
    )
    ic_part: str = "U*"
    mcu_part: str = "U1"
    led_driver_pin: str = "PB5"
    reset_pin: str = "RESET"
    reset_pullup_net: str = "VCC"
    resistor_deviceset: str = "RESISTOR*"
    led_deviceset: str = "LED*"
    led_anode_pin: str = "A"
    led_cathode_pin: str = "C"

    def __post_init__(self) -> None:
        if not self.board_max_extent > 0:
            raise ConfigError("board_max_extent must be > 0")
        if not self.placement_grid > 0:
            raise ConfigError("placement_grid must be > 0")

    def updated(self, overrides: Mapping[str, Any], where: str = "params") -> "CheckParams":
        if not overrides:
            return self
        known = {f.name: f for f in dataclasses.fields(self)}
        changes = {}
        for key, raw in overrides.items():
            if key not in known:
                raise ConfigError(f"{where}: unknown parameter {key!r}")
            changes[key] = _coerce(key, raw, getattr(self, key), where)
        return dataclasses.replace(self, **changes)


def _coerce(key: str, raw: Any, current: Any, where: str) -> Any:
    try:
        if isinstance(current, frozenset):
            return frozenset(int(v) for v in raw)
        if isinstance(current, tuple):
            if isinstance(raw, str):
                raise TypeError("expected a list")
            return tuple(str(v) for v in raw)
        if isinstance(current, Mapping):
            return MappingProxyType({str(k): str(v) for k, v in dict(raw).items()})
        if isinstance(current, float):
            if isinstance(raw, bool):
                raise TypeError("expected a number")
            return float(raw)
        if isinstance(current, str):
            if not isinstance(raw, str):
                raise TypeError("expected a string")
            return raw
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from None
    raise ConfigError(f"{where}: cannot set {key!r}")  # pragma: no cover


@dataclass(frozen=True)
class LabConfig:
    id: str
    documents: frozenset[str]
    rules: tuple[str, ...]
    params: CheckParams = CheckParams()
    rule_params: Mapping[str, Mapping[str, Any]] = field(default=MappingProxyType({}), hash=False)

    def params_for(self, rule_id: str) -> CheckParams:
        extra = {
            k: v for k, v in self.rule_params.get(rule_id, {}).items()
            if k in _PARAM_NAMES
        }
        return self.params.updated(extra, f"labs.{self.id}.rule_params.{rule_id}")

    def options_for(self, rule_id: str) -> Mapping[str, Any]:
        return MappingProxyType(
            {k: v for k, v in self.rule_params.get(rule_id, {}).items() if k not in _PARAM_NAMES}
        )


_PARAM_NAMES = frozenset(f.name for f in dataclasses.fields(CheckParams))


@dataclass(frozen=True)
class RuleSetConfig:
    labs: Mapping[str, LabConfig]
    registry: Registry = field(hash=False, compare=False)
    params: CheckParams = CheckParams()


def _pattern_rule(rule_id: str, spec: Mapping[str, Any]) -> Rule:
    where = f"patterns.{rule_id}"
    extra = set(spec) - {"pattern", "title", "severity", "message"}
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")
    if "pattern" not in spec:
        raise ConfigError(f"{where}: missing 'pattern'")
    try:
        pat = compile_pattern(spec["pattern"])
        severity = Severity(spec.get("severity", "error"))
    except (PatternError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None
    message = spec.get("message", f"no path matches {pat}")

    def check(ctx: RuleContext):
        from ..pattern import match_pattern

        if not match_pattern(ctx.netlist, ctx.schematic, pat):
            yield ctx.finding("schematic", message)

    return Rule(
        id=rule_id,
        title=spec.get("title", f"required path {rule_id}"),
        severity=severity,
        phase=Phase.FULL,
        applies_to=frozenset({DocKind.SCHEMATIC}),
        check=check,
    )


def _default_registry() -> Registry:
    from .. import checks

    return checks.REGISTRY


def build_config(raw: Mapping[str, Any], registry: Optional[Registry] = None) -> RuleSetConfig:
    base = registry if registry is not None else _default_registry()
    unknown = set(raw) - {"params", "labs", "patterns"}
    if unknown:
        raise ConfigError(f"unknown top-level sections {sorted(unknown)}")

    reg = Registry()
    for rule in base:
        reg.add(rule)
    for rule_id, spec in sorted(raw.get("patterns", {}).items()):
        if rule_id in reg or rule_id.startswith("X"):
            raise ConfigError(f"patterns.{rule_id}: id is taken or reserved")
        reg.add(_pattern_rule(rule_id, spec))

    params = CheckParams().updated(raw.get("params", {}))
    labs = {}
    for lab_id, spec in raw.get("labs", {}).items():
        labs[lab_id] = _lab(lab_id, spec, params, reg)
    if not labs:
        raise ConfigError("no labs defined")
    return RuleSetConfig(labs=MappingProxyType(labs), registry=reg, params=params)


def _lab(lab_id: str, spec: Mapping[str, Any], params: CheckParams, reg: Registry) -> LabConfig:
    where = f"labs.{lab_id}"
    extra = set(spec) - {"documents", "rules", "params", "rule_params"}
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")
    documents = frozenset(spec.get("documents", ()))
    if not documents or not documents <= _DOCUMENTS:
        raise ConfigError(f"{where}: documents must be a non-empty subset of {sorted(_DOCUMENTS)}")
    rules = tuple(spec.get("rules", ()))
    if len(set(rules)) != len(rules):
        raise ConfigError(f"{where}: a rule is listed twice")
    for rule_id in rules:
        if rule_id not in reg:
            raise ConfigError(f"{where}: unknown rule {rule_id!r}")
        if not reg[rule_id].runnable_with(documents):
            raise ConfigError(
                f"{where}: rule {rule_id} needs "
                f"{' or '.join(sorted(k.value for k in reg[rule_id].applies_to))}, "
                f"lab provides {', '.join(sorted(documents))}"
            )
    lab = LabConfig(
        id=lab_id,
        documents=documents,
        rules=rules,
        params=params.updated(spec.get("params", {}), f"{where}.params"),
        rule_params=MappingProxyType(
            {k: MappingProxyType(dict(v)) for k, v in spec.get("rule_params", {}).items()}
        ),
    )
    for rule_id, values in lab.rule_params.items():
        if rule_id not in rules:
            raise ConfigError(f"{where}.rule_params: rule {rule_id!r} is not enabled")
        lab.params_for(rule_id)
        for key, value in lab.options_for(rule_id).items():
            if key not in reg[rule_id].options:
                raise ConfigError(f"{where}.rule_params.{rule_id}: unknown option {key!r}")
            if key == "pattern":
                try:
                    compile_pattern(value)
                except PatternError as exc:
                    raise ConfigError(f"{where}.rule_params.{rule_id}: {exc}") from None
    return lab


def load_config(source: Union[bytes, str, Path], registry: Optional[Registry] = None) -> RuleSetConfig:
    if isinstance(source, Path):
        source = source.read_bytes()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        raw = tomllib.loads(source)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"not valid TOML: {exc}") from None
    return build_config(raw, registry)


def default_config_text() -> str:
    return resources.files("pcblint").joinpath("data/default_rules.toml").read_text("utf-8")


def default_config() -> RuleSetConfig:
    return load_config(default_config_text())
