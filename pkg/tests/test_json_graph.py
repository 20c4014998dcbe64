from __future__ import annotations

import json

import pytest

from molayout.classification import dataflow
from molayout.graph import Direction, InvalidGraphError, PortOrigin, PortSide
from molayout.json_graph import JsonGraphError, load_json_graph, parse_json_graph


def _doc(**extra) -> dict:
    doc = {
        "nodes": [{"id": "a"}, {"id": "b", "kind": "reaction"}],
        "edges": [{"source": "a", "target": "b", "order": 1}, {"source": "b", "target": "a", "order": 0}],
    }
    doc.update(extra)
    return doc


def test_orders_and_defaults():
    g = parse_json_graph(json.dumps(_doc()))
    assert g.direction is Direction.RIGHT
    assert [(n.id, n.model_order, n.kind) for n in g.nodes] == [("a", 0, "node"), ("b", 1, "reaction")]
    assert [(e.id, e.model_order) for e in g.edges] == [("e0", 1), ("e1", 0)]


def test_explicit_ports_and_sides():
    doc = {
        "direction": "down",
        "nodes": [
            {"id": "r", "fixedPortOrder": True, "ports": [{"id": "p", "side": "east", "order": 1}, {"id": "q"}]},
            {"id": "s"},
        ],
        "edges": [{"source": "r", "sourcePort": "p", "target": "s"}],
    }
    g = parse_json_graph(json.dumps(doc))
    r = g.node("r")
    assert r.fixed_port_order
    assert [(p.id, p.side, p.model_order, p.origin) for p in r.ports] == [
        ("p", PortSide.EAST, 1, PortOrigin.EXPLICIT),
        ("q", PortSide.UNASSIGNED, 1, PortOrigin.EXPLICIT),
    ]
    assert g.direction is Direction.DOWN


def test_children_inherit_direction():
    doc = {"direction": "down", "nodes": [{"id": "c", "children": {"nodes": [{"id": "x"}]}}]}
    g = parse_json_graph(json.dumps(doc))
    assert g.node("c").children.direction is Direction.DOWN


def test_classification_assigns_groups():
    doc = {"nodes": [{"id": "r", "kind": "reaction"}, {"id": "t", "kind": "timer"}, {"id": "u", "kind": "timer", "group": 7}]}
    g = parse_json_graph(json.dumps(doc), classification=dataflow())
    assert [n.group for n in g.nodes] == [1, 3, 7]


@pytest.mark.parametrize(
    "doc, path",
    [
        ({"edges": []}, "$"),
        ({"nodes": [{"id": 3}]}, "$.nodes[0].id"),
        ({"nodes": [{"id": "a", "group": -1}]}, "$.nodes[0].group"),
        ({"nodes": [{"id": "a"}], "edges": [{"source": "a"}]}, "$.edges[0]"),
        ({"nodes": [], "direction": "sideways"}, "$.direction"),
        ({"nodes": [{"id": "a", "ports": [{"id": "p", "side": "up"}]}]}, "$.nodes[0].ports[0].side"),
    ],
)
def test_schema_errors_carry_paths(doc, path):
    with pytest.raises(JsonGraphError) as info:
        parse_json_graph(json.dumps(doc))
    assert info.value.path == path


def test_invalid_json_text():
    with pytest.raises(JsonGraphError, match="line 1"):
        parse_json_graph("{nodes: }")


def test_reference_errors_are_invalid_graphs():
    with pytest.raises(InvalidGraphError):
        parse_json_graph(json.dumps({"nodes": [{"id": "a"}], "edges": [{"source": "a", "target": "zz"}]}))
    with pytest.raises(InvalidGraphError):
        parse_json_graph(json.dumps({"nodes": [{"id": "a"}, {"id": "a"}]}))


def test_unknown_fields_strict_versus_lenient():
    doc = _doc(color="red")
    doc["nodes"][0]["shape"] = "round"
    with pytest.raises(JsonGraphError):
        load_json_graph(json.dumps(doc), strict=True)
    loaded = load_json_graph(json.dumps(doc), strict=False)
    assert len(loaded.warnings) == 2
    assert any("$.nodes[0]" in w for w in loaded.warnings)
    assert loaded.graph == parse_json_graph(json.dumps(_doc()))


def test_lenient_mode_still_rejects_type_errors():
    with pytest.raises(JsonGraphError):
        load_json_graph(json.dumps({"nodes": [{"id": "a", "width": "wide"}]}), strict=False)


def test_geometry_fields_are_ignored():
    plain = parse_json_graph(json.dumps(_doc()))
    doc = _doc(canvas={"width": 10, "height": 5})
    doc["nodes"][0].update(x=4, y=9)
    doc["edges"][0].update(reversed=True, sourcePoint={"x": 0, "y": 0}, targetPoint={"x": 1, "y": 1}, bendPoints=[])
    assert parse_json_graph(json.dumps(doc)) == plain


def test_compound_size_is_derived():
    doc = {"nodes": [{"id": "c", "width": 999, "height": 999, "children": {"nodes": [{"id": "x"}]}}, {"id": "d", "width": 77}]}
    g = parse_json_graph(json.dumps(doc))
    assert g.node("c").width != 999
    assert g.node("d").width == 77
