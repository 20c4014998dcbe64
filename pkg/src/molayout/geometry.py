"""Coordinates for nodes, ports and edges.

Placement packs each layer along the in-layer axis, then runs one alignment
pass that pulls nodes toward the mean of their predecessors without ever
changing their order or shrinking the spacing. Routing draws polylines
through dummy positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Direction, Edge, Graph, PortSide
from .layering import Layering
from .ordering import LayerOrders, free_side

LOOP_EXTENT = 12.0

Point = tuple[float, float]


@dataclass
class NodeBox:
    id: str
    x: float
    y: float
    width: float
    height: float
    layer: int
    rank: int
    kind: str = "node"
    children: LayoutResult | None = None

    @property
    def center(self) -> Point:
        return (self.x + self.width / 2, self.y + self.height / 2)

    def translate(self, dx: float, dy: float) -> None:
        self.x += dx
        self.y += dy
        if self.children is not None:
            self.children.translate(dx, dy)


@dataclass
class PortAnchor:
    node: str
    port: str
    side: PortSide
    x: float
    y: float


@dataclass
class EdgeRoute:
    id: str
    source: str
    target: str
    points: list[Point]
    reversed: bool = False
    priority_label: int | None = None
    source_port: str | None = None
    target_port: str | None = None


@dataclass
class LayoutResult:
    graph: Graph
    direction: Direction
    nodes: dict[str, NodeBox] = field(default_factory=dict)
    dummies: dict[str, Point] = field(default_factory=dict)
    ports: dict[tuple[str, str], PortAnchor] = field(default_factory=dict)
    edges: dict[str, EdgeRoute] = field(default_factory=dict)
    # interface port id -> anchor on the owning compound's boundary
    interface: dict[str, Point] = field(default_factory=dict)

    def all_points(self) -> list[Point]:
        pts: list[Point] = []
        for b in self.nodes.values():
            pts += [(b.x, b.y), (b.x + b.width, b.y + b.height)]
        pts += list(self.dummies.values())
        for r in self.edges.values():
            pts += r.points
        pts += [(a.x, a.y) for a in self.ports.values()]
        return pts

    def bounds(self) -> tuple[float, float, float, float]:
        pts = self.all_points()
        if not pts:
            return (0.0, 0.0, 0.0, 0.0)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        return (min(xs), min(ys), max(xs), max(ys))

    @property
    def width(self) -> float:
        x0, _, x1, _ = self.bounds()
        return x1 - x0

    @property
    def height(self) -> float:
        _, y0, _, y1 = self.bounds()
        return y1 - y0

    def origin(self) -> Point:
        x0, y0, _, _ = self.bounds()
        return (x0, y0)

    def translate(self, dx: float, dy: float) -> None:
        for b in self.nodes.values():
            b.translate(dx, dy)
        self.dummies = {k: (x + dx, y + dy) for k, (x, y) in self.dummies.items()}
        for a in self.ports.values():
            a.x += dx
            a.y += dy
        for r in self.edges.values():
            r.points = [(x + dx, y + dy) for x, y in r.points]
        self.interface = {k: (x + dx, y + dy) for k, (x, y) in self.interface.items()}

    def normalize(self) -> None:
        x0, y0, _, _ = self.bounds()
        if x0 or y0:
            self.translate(-x0, -y0)


# --- placement ------------------------------------------------------------------


def _axes(direction: Direction):
    """(extent along the layer axis, extent along the in-layer axis) of a box."""
    if direction is Direction.RIGHT:
        return (lambda w, h: w), (lambda w, h: h)
    return (lambda w, h: h), (lambda w, h: w)


def place_nodes(
    graph: Graph,
    layering: Layering,
    orders: LayerOrders,
    direction: Direction,
    node_spacing: float,
    layer_spacing: float,
    sizes: dict[str, tuple[float, float]] | None = None,
    loop_nodes: frozenset[str] = frozenset(),
) -> LayoutResult:
    """Place every node of a layered graph; dummies become points.

    ``sizes`` overrides node sizes (compound nodes sized by their children).
    Nodes carrying self-loops get extra room on their free side.
    """
    nodes = graph.node_map()
    sizes = dict(sizes or {})
    for n in graph.nodes:
        sizes.setdefault(n.id, (n.width, n.height))
    along, across = _axes(direction)

    thickness = [max((along(*sizes[v]) for v in layer), default=0.0) for layer in orders.layers]
    offsets: list[float] = []
    acc = 0.0
    for t in thickness:
        offsets.append(acc)
        acc += t + layer_spacing

    preds: dict[str, list[str]] = {}
    for e in graph.edges:
        if not e.is_self_loop:
            preds.setdefault(e.head, []).append(e.tail)

    center: dict[str, float] = {}
    for i, layer in enumerate(orders.layers):
        prev_end: float | None = None
        for v in layer:
            size = across(*sizes[v])
            desired = 0.0 if prev_end is None else prev_end + node_spacing + size / 2
            if i > 0 and preds.get(v):
                desired = max(desired, sum(center[u] for u in preds[v]) / len(preds[v]))
            center[v] = desired if prev_end is None else max(desired, prev_end + node_spacing + size / 2)
            if prev_end is None and not preds.get(v):
                center[v] = size / 2
            prev_end = center[v] + size / 2 + (LOOP_EXTENT if v in loop_nodes else 0.0)

    result = LayoutResult(graph, direction)
    for i, layer in enumerate(orders.layers):
        for rank, v in enumerate(layer):
            w, h = sizes[v]
            lay = offsets[i] + (thickness[i] - along(w, h)) / 2
            inl = center[v] - across(w, h) / 2
            x, y = (lay, inl) if direction is Direction.RIGHT else (inl, lay)
            if layering.is_dummy(v):
                result.dummies[v] = (x + w / 2, y + h / 2)
            else:
                n = nodes[v]
                result.nodes[v] = NodeBox(v, x, y, w, h, i, rank, n.kind)
    return result


# --- routing --------------------------------------------------------------------


def _side_point(box: NodeBox, side: PortSide, frac: float) -> Point:
    if side is PortSide.NORTH:
        return (box.x + box.width * frac, box.y)
    if side is PortSide.SOUTH:
        return (box.x + box.width * frac, box.y + box.height)
    if side is PortSide.WEST:
        return (box.x, box.y + box.height * frac)
    return (box.x + box.width, box.y + box.height * frac)


def place_ports(
    layout: LayoutResult,
    orders: LayerOrders,
    overrides: dict[tuple[str, str], Point] | None = None,
) -> None:
    """Spread each side's ports evenly, in order; ``overrides`` are offsets from the box corner."""
    overrides = overrides or {}
    for node_id, sides in orders.ports.items():
        box = layout.nodes.get(node_id)
        if box is None:
            continue
        for side, ids in sides.items():
            k = len(ids)
            for i, pid in enumerate(ids):
                if (node_id, pid) in overrides:
                    dx, dy = overrides[(node_id, pid)]
                    x, y = box.x + dx, box.y + dy
                else:
                    x, y = _side_point(box, side, (i + 1) / (k + 1))
                layout.ports[(node_id, pid)] = PortAnchor(node_id, pid, side, x, y)


def _anchor(layout: LayoutResult, node: str, port: str | None) -> Point:
    if port is not None and (node, port) in layout.ports:
        a = layout.ports[(node, port)]
        return (a.x, a.y)
    if node in layout.dummies:
        return layout.dummies[node]
    return layout.nodes[node].center


def _loop_points(layout: LayoutResult, e: Edge, direction: Direction) -> list[Point]:
    box = layout.nodes[e.source]
    a = _anchor(layout, e.source, e.source_port)
    b = _anchor(layout, e.target, e.target_port)
    side = free_side(direction)
    if side is PortSide.EAST:
        out = box.x + box.width + LOOP_EXTENT
        if a == b:
            b = (b[0], b[1] + box.height / 4)
        return [a, (out, a[1]), (out, b[1]), b]
    out = box.y + box.height + LOOP_EXTENT
    if a == b:
        b = (b[0] + box.width / 4, b[1])
    return [a, (a[0], out), (b[0], out), b]


def route_edges(layout: LayoutResult, graph: Graph, layering: Layering) -> LayoutResult:
    """Polylines from original source to original target through the dummy chain.

    ``graph`` is the pre-dummy graph with reversal flags; reversed edges are
    laid out tail-to-head and their point list is flipped back so the arrow
    ends at the original target.
    """
    for e in graph.edges_by_order():
        if e.is_self_loop:
            pts = _loop_points(layout, e, layout.direction)
        else:
            chain = layering.dummy_chains.get(e.id, [])
            pts = [_anchor(layout, e.tail, e.tail_port)]
            pts += [layout.dummies[d] for d in chain]
            pts.append(_anchor(layout, e.head, e.head_port))
            if e.reversed:
                pts.reverse()
        layout.edges[e.id] = EdgeRoute(
            e.id, e.source, e.target, pts, e.reversed, e.priority_label, e.source_port, e.target_port
        )
    return layout
