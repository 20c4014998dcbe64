"""SVG and layout-JSON emission.

Both emitters walk elements in model order and format numbers with at most
two decimals, so identical layouts give identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any
from xml.sax.saxutils import escape, quoteattr

from .geometry import LayoutResult, Point
from .graph import Graph, PortOrigin, PortSide

MARGIN = 20.0
PORT_SIZE = 6.0


def fmt(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _num(v: float) -> float | int:
    r = round(v, 2)
    if r == int(r):
        return int(r)
    return r


@dataclass(frozen=True)
class SvgOptions:
    margin: float = MARGIN
    show_ports: bool = True
    font_size: float = 12.0


# --- SVG ------------------------------------------------------------------------


class _Svg:
    def __init__(self, opts: SvgOptions):
        self.opts = opts
        self.lines: list[str] = []
        self.dx = opts.margin
        self.dy = opts.margin

    def x(self, v: float) -> str:
        return fmt(v + self.dx)

    def y(self, v: float) -> str:
        return fmt(v + self.dy)

    def points(self, pts: list[Point]) -> str:
        return " ".join(f"{self.x(px)},{self.y(py)}" for px, py in pts)

    def add(self, line: str, depth: int = 1) -> None:
        self.lines.append("  " * depth + line)


def _node_style(kind: str) -> tuple[str, str]:
    """(rx, css class) per node kind."""
    if kind == "connector":
        return "6", "connector"
    if kind in ("state", "initial-state", "final-state"):
        return "6", kind
    return "2", "node"


def _label_point(pts: list[Point]) -> Point:
    (x0, y0), (x1, y1) = pts[0], pts[1]
    return (x0 + (x1 - x0) * 0.25 + 4, y0 + (y1 - y0) * 0.25 - 4)


def _draw(svg: _Svg, layout: LayoutResult, depth: int) -> None:
    fs = svg.opts.font_size
    graph = layout.graph
    for n in graph.nodes:
        box = layout.nodes.get(n.id)
        if box is None:
            continue
        rx, cls = _node_style(box.kind)
        if box.children is not None:
            cls = "compound"
        svg.add(
            f'<rect id={quoteattr("node-" + n.id)} class="{cls}" x="{svg.x(box.x)}" y="{svg.y(box.y)}" '
            f'width="{fmt(box.width)}" height="{fmt(box.height)}" rx="{rx}"/>',
            depth,
        )
        if box.children is not None:
            svg.add(
                f'<text class="label" x="{svg.x(box.x + 4)}" y="{svg.y(box.y + fs)}">{escape(n.id)}</text>',
                depth,
            )
            _draw(svg, box.children, depth + 1)
        elif box.kind != "connector":
            cx, cy = box.center
            svg.add(
                f'<text class="label" x="{svg.x(cx)}" y="{svg.y(cy)}" text-anchor="middle" '
                f'dominant-baseline="central">{escape(n.id)}</text>',
                depth,
            )
        if svg.opts.show_ports:
            for p in n.ports:
                a = layout.ports.get((n.id, p.id))
                if p.origin is PortOrigin.EXPLICIT and a is not None:
                    h = PORT_SIZE / 2
                    svg.add(
                        f'<rect class="port" x="{svg.x(a.x - h)}" y="{svg.y(a.y - h)}" '
                        f'width="{fmt(PORT_SIZE)}" height="{fmt(PORT_SIZE)}"/>',
                        depth,
                    )

    for e in graph.edges_by_order():
        route = layout.edges.get(e.id)
        if route is None:
            continue
        cls = "edge reversed" if route.reversed else "edge"
        svg.add(
            f'<polyline id={quoteattr("edge-" + e.id)} class="{cls}" points="{svg.points(route.points)}" '
            f'marker-end="url(#arrow)"/>',
            depth,
        )
        if route.priority_label is not None and len(route.points) >= 2:
            lx, ly = _label_point(route.points)
            svg.add(f'<text class="priority" x="{svg.x(lx)}" y="{svg.y(ly)}">{route.priority_label}</text>', depth)


def emit_svg(layout: LayoutResult, options: SvgOptions | None = None) -> str:
    """Render a layout as a standalone SVG 1.1 document."""
    opts = options or SvgOptions()
    svg = _Svg(opts)
    x0, y0, x1, y1 = layout.bounds()
    svg.dx, svg.dy = opts.margin - x0, opts.margin - y0
    w = (x1 - x0) + 2 * opts.margin
    h = (y1 - y0) + 2 * opts.margin
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{fmt(w)}" height="{fmt(h)}" '
        f'viewBox="0 0 {fmt(w)} {fmt(h)}">',
        "  <defs>",
        '    <marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="8" markerHeight="8" '
        'orient="auto">',
        '      <polyline points="0,0 10,5 0,10" fill="#333" stroke="none"/>',
        "    </marker>",
        "    <style>",
        "      rect { fill: #fff; stroke: #333; stroke-width: 1; }",
        "      rect.compound { fill: #f4f4f4; }",
        "      rect.connector { fill: #333; }",
        "      rect.initial-state { stroke-width: 2.5; }",
        "      rect.final-state { stroke-width: 2.5; stroke-dasharray: 4 2; }",
        "      rect.port { fill: #333; }",
        "      polyline.edge { fill: none; stroke: #333; stroke-width: 1; }",
        "      text { font-family: sans-serif; font-size: %spx; fill: #111; }" % fmt(opts.font_size),
        "    </style>",
        "  </defs>",
    ]
    _draw(svg, layout, 1)
    out += svg.lines
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --- layout JSON ----------------------------------------------------------------


def _pt(p: Point) -> dict[str, float | int]:
    return {"x": _num(p[0]), "y": _num(p[1])}


def _graph_json(graph: Graph, layout: LayoutResult, top: bool) -> dict[str, Any]:
    nodes_out = []
    for n in graph.nodes:
        box = layout.nodes[n.id]
        d: dict[str, Any] = {"id": n.id}
        if n.group:
            d["group"] = n.group
        if n.kind != "node":
            d["kind"] = n.kind
        if n.fixed_port_order:
            d["fixedPortOrder"] = True
        d.update(x=_num(box.x), y=_num(box.y), width=_num(box.width), height=_num(box.height))
        ports = []
        for p in n.ports:
            if p.origin is not PortOrigin.EXPLICIT:
                continue
            pd: dict[str, Any] = {"id": p.id}
            if p.side is not PortSide.UNASSIGNED:
                pd["side"] = p.side.value
            pd["order"] = p.model_order
            a = layout.ports.get((n.id, p.id))
            if a is not None:
                pd["anchor"] = _pt((a.x, a.y))
            ports.append(pd)
        if ports:
            d["ports"] = ports
        if n.children is not None:
            assert box.children is not None
            d["children"] = _graph_json(n.children, box.children, top=False)
        nodes_out.append(d)

    implicit = {(n.id, p.id) for n in graph.nodes for p in n.ports if p.origin is PortOrigin.IMPLICIT}
    edges_out = []
    for e in graph.edges:
        route = layout.edges[e.id]
        ed: dict[str, Any] = {"id": e.id, "source": e.source, "target": e.target}
        if e.source_port is not None and (e.source, e.source_port) not in implicit:
            ed["sourcePort"] = e.source_port
        if e.target_port is not None and (e.target, e.target_port) not in implicit:
            ed["targetPort"] = e.target_port
        ed["order"] = e.model_order
        if e.priority_label is not None:
            ed["priority"] = e.priority_label
        ed["reversed"] = route.reversed
        ed["sourcePoint"] = _pt(route.points[0])
        ed["targetPoint"] = _pt(route.points[-1])
        ed["bendPoints"] = [_pt(p) for p in route.points[1:-1]]
        edges_out.append(ed)

    out: dict[str, Any] = {}
    if top:
        out["direction"] = graph.direction.value
        x0, y0, x1, y1 = layout.bounds()
        out["canvas"] = {"width": _num(x1 - x0), "height": _num(y1 - y0)}
    out["nodes"] = nodes_out
    out["edges"] = edges_out
    return out


def emit_layout_json(layout: LayoutResult, graph: Graph) -> str:
    """Serialize ``graph`` (the input graph) with the coordinates from ``layout``.

    Only explicit ports are written; implicit ones are an internal detail and
    are synthesized again on re-ingestion.
    """
    return json.dumps(_graph_json(graph, layout, top=True), indent=2) + "\n"
