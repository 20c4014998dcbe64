"""The full layout pipeline, including bottom-up layout of compound nodes.

A compound node's child graph is laid out first. Each explicit port of the
compound becomes an interface node inside the child: ports feeding the child
sit in the first layer, ports fed by it in the last. The order the child
settles on for those nodes becomes the compound's port order in the parent,
and the parent treats the compound as an opaque box with fixed ports.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .config import LayoutConfig
from .cycles import ReversalSet, break_cycles
from .geometry import EdgeRoute, LayoutResult, NodeBox, place_nodes, place_ports, route_edges
from .graph import (
    Direction,
    Edge,
    Graph,
    Node,
    PortOrigin,
    PortSide,
    ensure_valid,
    synthesize_implicit_ports,
)
from .layering import Layering, assign_layers, insert_dummies
from .metrics import MetricsReport, count_crossings, node_inversions, port_edge_inversions
from .ordering import (
    LayerOrders,
    assign_port_sides,
    input_side,
    minimize_crossings,
    output_side,
)

INTERFACE_KIND = "interface-port"
COMPOUND_PADDING = 20.0


def interface_node_id(port_id: str) -> str:
    return f"@{port_id}"


@dataclass
class PhaseTrace:
    """Intermediate state of every phase for one hierarchy level."""

    reversal: ReversalSet
    layering: Layering
    # after dummy insertion
    layered_graph: Graph
    dummy_layering: Layering
    preorder: LayerOrders
    final: LayerOrders
    crossings: int
    node_inversions: int
    edge_inversions: int
    group_restricted: bool = False
    # interface node ids in this (child) level, empty at top level
    interface_nodes: frozenset[str] = frozenset()
    children: dict[str, PhaseTrace] = field(default_factory=dict)

    @property
    def reversed_edges(self) -> frozenset[str]:
        return self.reversal.reversed_edges

    def totals(self) -> tuple[int, int, int, int]:
        """(crossings, backward edges, node inversions, edge inversions) over all levels."""
        c, b = self.crossings, len(self.reversed_edges)
        n, e = self.node_inversions, self.edge_inversions
        for child in self.children.values():
            cc, cb, cn, ce = child.totals()
            c, b, n, e = c + cc, b + cb, n + cn, e + ce
        return c, b, n, e

    def metrics(self) -> MetricsReport:
        c, b, n, e = self.totals()
        return MetricsReport(c, b, n, e, self.layering.layer_count)


# --- compound interface ---------------------------------------------------------


@dataclass
class _Interface:
    inputs: list[str]
    outputs: list[str]


def _classify_ports(parent: Node, child: Graph, direction: Direction) -> _Interface:
    """Split the parent's explicit ports into inputs and outputs of the child graph."""
    role: dict[str, str] = {}
    for e in sorted(child.edges, key=lambda e: (e.model_order, e.id)):
        if e.source == parent.id and e.source_port is not None:
            role.setdefault(e.source_port, "in")
        if e.target == parent.id and e.target_port is not None:
            role.setdefault(e.target_port, "out")
    inputs: list[str] = []
    outputs: list[str] = []
    for p in parent.ports:
        if p.origin is not PortOrigin.EXPLICIT:
            continue
        r = role.get(p.id)
        if r is None:
            r = "in" if p.side in (PortSide.UNASSIGNED, input_side(direction)) else "out"
        (inputs if r == "in" else outputs).append(p.id)
    return _Interface(inputs, outputs)


def _child_internal_graph(parent: Node, child: Graph, iface: _Interface, direction: Direction) -> Graph:
    """Child graph with interface nodes standing in for the parent's ports.

    Inputs take model orders before the child nodes and outputs after them.
    For a non-fixed parent, interface nodes are ranked by their first
    incident child edge, so the child's own order decides the interface.
    """
    first_edge: dict[str, int] = {}
    for e in child.edges:
        for end, port in ((e.source, e.source_port), (e.target, e.target_port)):
            if end == parent.id and port is not None:
                first_edge[port] = min(first_edge.get(port, e.model_order), e.model_order)

    def rank(ids: list[str]) -> list[str]:
        if parent.fixed_port_order:
            return ids
        declared = {p: i for i, p in enumerate(ids)}
        return sorted(ids, key=lambda p: (first_edge.get(p, len(child.edges)), declared[p]))

    inputs, outputs = rank(iface.inputs), rank(iface.outputs)
    nodes: list[Node] = []

    def add(node: Node) -> None:
        nodes.append(replace(node, model_order=len(nodes)))

    for p in inputs:
        add(Node(interface_node_id(p), 0, kind=INTERFACE_KIND, width=0.0, height=0.0))
    for n in child.nodes:
        add(n)
    for p in outputs:
        add(Node(interface_node_id(p), 0, kind=INTERFACE_KIND, width=0.0, height=0.0))

    edges = []
    for e in child.edges:
        if e.source == parent.id:
            e = replace(e, source=interface_node_id(e.source_port), source_port=None)
        if e.target == parent.id:
            e = replace(e, target=interface_node_id(e.target_port), target_port=None)
        edges.append(e)
    return Graph(tuple(nodes), tuple(edges), direction)


def _orient_interface(rs: ReversalSet, inputs: set[str], outputs: set[str]) -> ReversalSet:
    """Make input interface nodes pure sources and outputs pure sinks."""
    edges = []
    chosen = set(rs.reversed_edges)
    for e in rs.graph.edges:
        if e.is_self_loop:
            edges.append(e)
            continue
        want: bool | None = None
        if e.source in inputs or e.target in outputs:
            want = False
        elif e.target in inputs or e.source in outputs:
            want = True
        if want is not None and want != e.reversed:
            e = replace(e, reversed=want)
            chosen.symmetric_difference_update({e.id})
        edges.append(e)
    return ReversalSet(frozenset(chosen), replace(rs.graph, edges=tuple(edges)))


# --- one level ------------------------------------------------------------------


def _layout_level(
    graph: Graph,
    config: LayoutConfig,
    direction: Direction,
    interface: tuple[set[str], set[str]] | None = None,
    fixed_interface: bool = False,
) -> tuple[LayoutResult, PhaseTrace]:
    graph = synthesize_implicit_ports(replace(graph, direction=direction))

    # children first
    sizes: dict[str, tuple[float, float]] = {}
    child_results: dict[str, LayoutResult] = {}
    child_traces: dict[str, PhaseTrace] = {}
    child_ifaces: dict[str, _Interface] = {}
    nodes = list(graph.nodes)
    for i, n in enumerate(nodes):
        if n.children is None:
            continue
        result, trace, iface, order = _layout_child(n, config, direction)
        child_results[n.id], child_traces[n.id], child_ifaces[n.id] = result, trace, iface
        w = max(result.width + 2 * COMPOUND_PADDING, n.width)
        h = max(result.height + 2 * COMPOUND_PADDING, n.height)
        sizes[n.id] = (w, h)
        nodes[i] = _apply_interface_order(n, order, iface, direction)
    graph = replace(graph, nodes=tuple(nodes))

    rs = break_cycles(graph, config.cycle_breaking)
    pinned_first: frozenset[str] = frozenset()
    pinned_last: frozenset[str] = frozenset()
    if interface is not None:
        rs = _orient_interface(rs, *interface)
        pinned_first, pinned_last = frozenset(interface[0]), frozenset(interface[1])
    oriented = rs.graph

    layering = assign_layers(oriented, pinned_first, pinned_last)
    layered, dlayering = insert_dummies(oriented, layering)

    strategy = config.crossmin_strategy()
    if fixed_interface:
        strategy = replace(strategy, pinned_kinds=strategy.pinned_kinds | {INTERFACE_KIND})
    sides = assign_port_sides(layered, direction)
    initial, final = minimize_crossings(layered, dlayering, strategy, sides)

    crossings = count_crossings(final, dlayering, layered)
    skip = pinned_first | pinned_last
    n_inv = node_inversions(
        LayerOrders([[v for v in layer if v not in skip] for layer in final.layers]),
        layered,
        config.group_restricted,
    )
    e_inv = port_edge_inversions(final, layered)

    loops = frozenset(e.source for e in oriented.edges if e.is_self_loop)
    result = place_nodes(
        layered, dlayering, final, direction, config.node_spacing, config.layer_spacing, sizes, loops
    )
    overrides = _compound_port_offsets(graph, child_results, child_ifaces, sizes, direction)
    place_ports(result, final, overrides)
    route_edges(result, oriented, dlayering)
    result.normalize()

    for node_id, child in child_results.items():
        box = result.nodes[node_id]
        child.translate(box.x + COMPOUND_PADDING, box.y + COMPOUND_PADDING)
        _attach_interface(child, node_id, result)
        box.children = child

    trace = PhaseTrace(
        rs,
        layering,
        layered,
        dlayering,
        initial,
        final,
        crossings,
        n_inv,
        e_inv,
        config.group_restricted,
        frozenset(skip),
        child_traces,
    )
    result.graph = oriented
    return result, trace


def _layout_child(
    parent: Node, config: LayoutConfig, direction: Direction
) -> tuple[LayoutResult, PhaseTrace, _Interface, list[str]]:
    child = parent.children
    assert child is not None
    iface = _classify_ports(parent, child, direction)
    internal = _child_internal_graph(parent, child, iface, direction)
    ins = {interface_node_id(p) for p in iface.inputs}
    outs = {interface_node_id(p) for p in iface.outputs}
    result, trace = _layout_level(internal, config, direction, (ins, outs), parent.fixed_port_order)

    # interface order as settled in the child's first and last layers
    order: list[str] = []
    for layer in trace.final.layers:
        for v in layer:
            if v in ins or v in outs:
                order.append(v[1:])
    return result, trace, iface, order


def _apply_interface_order(node: Node, order: list[str], iface: _Interface, direction: Direction) -> Node:
    """Reorder the compound's explicit ports to the child's interface order and fix their sides."""
    by_id = {p.id: p for p in node.ports}
    inputs = set(iface.inputs)
    explicit = []
    for pid in order:
        p = by_id[pid]
        if p.side is PortSide.UNASSIGNED:
            p = replace(p, side=input_side(direction) if pid in inputs else output_side(direction))
        explicit.append(p)
    rest = tuple(p for p in node.ports if p.id not in set(order))
    return replace(node, ports=tuple(explicit) + rest)


def _compound_port_offsets(
    graph: Graph,
    children: dict[str, LayoutResult],
    ifaces: dict[str, _Interface],
    sizes: dict[str, tuple[float, float]],
    direction: Direction,
) -> dict[tuple[str, str], tuple[float, float]]:
    """Project each interface node of a laid-out child onto its compound's boundary."""
    out: dict[tuple[str, str], tuple[float, float]] = {}
    nodes = graph.node_map()
    for node_id, child in children.items():
        w, h = sizes[node_id]
        ox, oy = child.origin()
        for p in nodes[node_id].ports:
            iid = interface_node_id(p.id)
            if iid not in child.nodes:
                continue
            cx, cy = child.nodes[iid].center
            cx, cy = cx - ox + COMPOUND_PADDING, cy - oy + COMPOUND_PADDING
            side = p.side
            if side is PortSide.WEST:
                out[(node_id, p.id)] = (0.0, cy)
            elif side is PortSide.EAST:
                out[(node_id, p.id)] = (w, cy)
            elif side is PortSide.NORTH:
                out[(node_id, p.id)] = (cx, 0.0)
            elif side is PortSide.SOUTH:
                out[(node_id, p.id)] = (cx, h)
    return out


def _attach_interface(child: LayoutResult, parent_id: str, parent: LayoutResult) -> None:
    """Replace interface nodes in a placed child with the parent's port anchors."""
    anchors: dict[str, tuple[float, float]] = {}
    for (owner, pid), a in parent.ports.items():
        if owner == parent_id:
            anchors[interface_node_id(pid)] = (a.x, a.y)
    for iid in [v for v in child.nodes if child.nodes[v].kind == INTERFACE_KIND]:
        del child.nodes[iid]
        child.interface[iid[1:]] = anchors.get(iid, (0.0, 0.0))

    for route in child.edges.values():
        pts = list(route.points)
        if route.source in anchors:
            pts[0] = anchors[route.source]
            route.source_port = route.source[1:]
            route.source = parent_id
        if route.target in anchors:
            pts[-1] = anchors[route.target]
            route.target_port = route.target[1:]
            route.target = parent_id
        route.points = pts
    child.ports = {k: a for k, a in child.ports.items() if k[0] not in anchors}


# --- entry point ----------------------------------------------------------------


def layout(graph: Graph, config: LayoutConfig | None = None) -> tuple[LayoutResult, PhaseTrace]:
    """Lay out a validated graph; returns geometry and the per-phase trace.

    ``result.graph`` is the graph with implicit ports and reversal flags as
    used by the phases.
    """
    config = config or LayoutConfig()
    ensure_valid(graph)
    direction = config.direction or graph.direction
    return _layout_level(graph, config, direction)


__all__ = [
    "COMPOUND_PADDING",
    "INTERFACE_KIND",
    "EdgeRoute",
    "NodeBox",
    "PhaseTrace",
    "interface_node_id",
    "layout",
]
