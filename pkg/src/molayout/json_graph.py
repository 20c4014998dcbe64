"""JSON graph ingestion.

Model orders are explicit: node order is list position, edge and port order
come from ``order`` fields and default to list position. The layout JSON
written by :mod:`molayout.render` is accepted as input; its geometry fields
are ignored.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from typing import Any

from jsonschema import Draft202012Validator

from .classification import OrderClassification
from .graph import (
    DEFAULT_HEIGHT,
    DEFAULT_WIDTH,
    Direction,
    Edge,
    Graph,
    InvalidGraphError,
    Node,
    Port,
    PortOrigin,
    PortSide,
    ensure_valid,
)

_POINT = {
    "type": "object",
    "properties": {"x": {"type": "number"}, "y": {"type": "number"}},
    "required": ["x", "y"],
    "additionalProperties": False,
}

_NAT = {"type": "integer", "minimum": 0}
_SIZE = {"type": "number", "exclusiveMinimum": 0}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$ref": "#/$defs/graph",
    "$defs": {
        "graph": {
            "type": "object",
            "properties": {
                "direction": {"enum": [d.value for d in Direction]},
                "nodes": {"type": "array", "items": {"$ref": "#/$defs/node"}},
                "edges": {"type": "array", "items": {"$ref": "#/$defs/edge"}},
                "canvas": {
                    "type": "object",
                    "properties": {"width": {"type": "number"}, "height": {"type": "number"}},
                    "additionalProperties": False,
                },
            },
            "required": ["nodes"],
            "additionalProperties": False,
        },
        "node": {
            "type": "object",
            "properties": {
                "id": {"type": "string", "minLength": 1},
                "group": _NAT,
                "kind": {"type": "string", "minLength": 1},
                "width": _SIZE,
                "height": _SIZE,
                "fixedPortOrder": {"type": "boolean"},
                "ports": {"type": "array", "items": {"$ref": "#/$defs/port"}},
                "children": {"$ref": "#/$defs/graph"},
                "x": {"type": "number"},
                "y": {"type": "number"},
            },
            "required": ["id"],
            "additionalProperties": False,
        },
        "port": {
            "type": "object",
            "properties": {
                "id": {"type": "string", "minLength": 1},
                "side": {"enum": [s.value for s in PortSide]},
                "order": _NAT,
                "anchor": _POINT,
            },
            "required": ["id"],
            "additionalProperties": False,
        },
        "edge": {
            "type": "object",
            "properties": {
                "id": {"type": "string", "minLength": 1},
                "source": {"type": "string", "minLength": 1},
                "target": {"type": "string", "minLength": 1},
                "sourcePort": {"type": "string", "minLength": 1},
                "targetPort": {"type": "string", "minLength": 1},
                "order": _NAT,
                "priority": _NAT,
                "reversed": {"type": "boolean"},
                "sourcePoint": _POINT,
                "targetPoint": _POINT,
                "bendPoints": {"type": "array", "items": _POINT},
            },
            "required": ["source", "target"],
            "additionalProperties": False,
        },
    },
}

_VALIDATOR = Draft202012Validator(SCHEMA)


class JsonGraphError(InvalidGraphError):
    def __init__(self, message: str, path: str = "$"):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _strip_unknown(data: Any, error) -> None:
    """Delete the properties an additionalProperties error complains about."""
    target = data
    for p in error.absolute_path:
        target = target[p]
    known = error.schema.get("properties", {})
    for key in [k for k in target if k not in known]:
        del target[key]


@dataclass
class JsonLoad:
    graph: Graph
    warnings: list[str]


def _graph(data: dict, classification: OrderClassification | None, direction: Direction | None) -> Graph:
    direction = Direction(data["direction"]) if "direction" in data else (direction or Direction.RIGHT)
    nodes: list[Node] = []
    for i, nd in enumerate(data["nodes"]):
        ports = tuple(
            Port(
                pd["id"],
                nd["id"],
                PortSide(pd.get("side", PortSide.UNASSIGNED.value)),
                pd.get("order", k),
                PortOrigin.EXPLICIT,
            )
            for k, pd in enumerate(nd.get("ports", ()))
        )
        kind = nd.get("kind", "node")
        group = nd.get("group")
        if classification is not None:
            group = classification.group_of(kind, group)
        children = _graph(nd["children"], classification, direction) if "children" in nd else None
        # a compound's size follows from its children
        width = DEFAULT_WIDTH if children is not None else nd.get("width", DEFAULT_WIDTH)
        height = DEFAULT_HEIGHT if children is not None else nd.get("height", DEFAULT_HEIGHT)
        nodes.append(
            Node(
                nd["id"],
                i,
                group=group or 0,
                kind=kind,
                children=children,
                fixed_port_order=nd.get("fixedPortOrder", False),
                width=float(width),
                height=float(height),
                ports=ports,
            )
        )
    edges = tuple(
        Edge(
            ed.get("id", f"e{j}"),
            ed["source"],
            ed["target"],
            ed.get("order", j),
            ed.get("sourcePort"),
            ed.get("targetPort"),
            ed.get("priority"),
        )
        for j, ed in enumerate(data.get("edges", ()))
    )
    return Graph(tuple(nodes), edges, direction)


def load_json_graph(
    text: str, strict: bool = True, classification: OrderClassification | None = None
) -> JsonLoad:
    """Parse and validate; in lenient mode unknown fields become warnings."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JsonGraphError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None

    warnings: list[str] = []
    errors = sorted(_VALIDATOR.iter_errors(data), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    hard = [e for e in errors if strict or e.validator != "additionalProperties"]
    if hard:
        e = hard[0]
        raise JsonGraphError(e.message, _path(e.absolute_path))
    if errors:
        data = copy.deepcopy(data)
        for e in errors:
            warnings.append(f"{_path(e.absolute_path)}: {e.message} (ignored)")
            _strip_unknown(data, e)
        # stripping may uncover nothing new, but re-check to be sure
        rest = list(_VALIDATOR.iter_errors(data))
        if rest:
            raise JsonGraphError(rest[0].message, _path(rest[0].absolute_path))

    graph = _graph(data, classification, None)
    return JsonLoad(ensure_valid(graph), warnings)


def parse_json_graph(
    text: str, strict: bool = True, classification: OrderClassification | None = None
) -> Graph:
    return load_json_graph(text, strict, classification).graph
