"""Layout configuration and the two input profiles."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from enum import Enum
from typing import Any

from .cycles import CycleBreakStrategy
from .graph import Direction
from .ordering import CrossMin, CrossMinStrategy, DummyRule, PortPolicy

DEFAULT_NODE_SPACING = 20.0
DEFAULT_LAYER_SPACING = 40.0


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LayoutConfig:
    """Strategy selection for every phase.

    The class defaults are the statechart profile. ``direction`` of None
    keeps the direction stored on the input graph. ``seed`` is recorded for
    reproducibility; no phase currently draws random numbers.
    """

    cycle_breaking: CycleBreakStrategy = CycleBreakStrategy.STRICT_MO
    crossing_min: CrossMin = CrossMin.BARYCENTER_MO
    group_restricted: bool = False
    port_policy: PortPolicy = PortPolicy.DERIVED_FROM_EDGES
    dummy_rule: DummyRule = DummyRule.FIRST_CONNECTION
    direction: Direction | None = None
    node_spacing: float = DEFAULT_NODE_SPACING
    layer_spacing: float = DEFAULT_LAYER_SPACING
    seed: int = 0
    constrain_node_order: bool = False
    pinned_kinds: frozenset[str] = frozenset()

    @classmethod
    def statechart(cls) -> LayoutConfig:
        return cls()

    @classmethod
    def dataflow(cls) -> LayoutConfig:
        return cls(
            cycle_breaking=CycleBreakStrategy.DEPTH_FIRST_MO,
            crossing_min=CrossMin.BARYCENTER_MO,
            group_restricted=True,
            port_policy=PortPolicy.FIXED_MODEL_ORDER,
            pinned_kinds=frozenset({"reaction"}),
        )

    def crossmin_strategy(self) -> CrossMinStrategy:
        return CrossMinStrategy(
            method=self.crossing_min,
            group_restricted=self.group_restricted,
            port_policy=self.port_policy,
            dummy_rule=self.dummy_rule,
            constrain_node_order=self.constrain_node_order,
            pinned_kinds=self.pinned_kinds,
        )

    # --- file form ---

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for k, v in asdict(self).items():
            if isinstance(v, Enum):
                v = v.value
            elif isinstance(v, frozenset):
                v = sorted(v)
            out[k] = v
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def updated(self, values: dict[str, Any]) -> LayoutConfig:
        """Copy with ``values`` (file-form keys and values) applied."""
        known = {f.name: f for f in fields(self)}
        changes: dict[str, Any] = {}
        for key, raw in values.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            changes[key] = _coerce(key, raw)
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, values: dict[str, Any], base: LayoutConfig | None = None) -> LayoutConfig:
        return (base or cls()).updated(values)

    @classmethod
    def from_json(cls, text: str, base: LayoutConfig | None = None) -> LayoutConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: line {exc.lineno}, column {exc.colno}: {exc.msg}")
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data, base)


_ENUMS: dict[str, type[Enum]] = {
    "cycle_breaking": CycleBreakStrategy,
    "crossing_min": CrossMin,
    "port_policy": PortPolicy,
    "dummy_rule": DummyRule,
    "direction": Direction,
}


def _coerce(key: str, raw: Any) -> Any:
    if key in _ENUMS:
        if key == "direction" and raw is None:
            return None
        enum = _ENUMS[key]
        if isinstance(raw, enum):
            return raw
        try:
            return enum(raw)
        except ValueError:
            allowed = ", ".join(m.value for m in enum)
            raise ConfigError(f"{key}: {raw!r} is not one of {allowed}") from None
    if key in ("group_restricted", "constrain_node_order"):
        if isinstance(raw, bool):
            return raw
        if isinstance(raw, str) and raw.lower() in ("true", "false"):
            return raw.lower() == "true"
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    if key in ("node_spacing", "layer_spacing"):
        try:
            value = float(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
        if not value > 0:
            raise ConfigError(f"{key}: must be positive")
        return value
    if key == "seed":
        if isinstance(raw, bool) or not isinstance(raw, (int, str)):
            raise ConfigError(f"seed: expected a natural number, got {raw!r}")
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"seed: expected a natural number, got {raw!r}") from None
        if value < 0:
            raise ConfigError("seed: must be non-negative")
        return value
    if key == "pinned_kinds":
        if isinstance(raw, str):
            raw = [k for k in raw.split(",") if k]
        if not isinstance(raw, (list, tuple, set, frozenset)) or not all(isinstance(k, str) for k in raw):
            raise ConfigError("pinned_kinds: expected a list of kind names")
        return frozenset(raw)
    raise ConfigError(f"unknown config key {key!r}")
