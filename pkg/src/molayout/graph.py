"""Core graph model: nodes, edges and ports carrying model order.

Graphs are immutable values. Phases never mutate an input graph; they build
new graphs with :func:`dataclasses.replace`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable


class Direction(Enum):
    RIGHT = "right"
    DOWN = "down"


class PortSide(Enum):
    NORTH = "north"
    EAST = "east"
    SOUTH = "south"
    WEST = "west"
    UNASSIGNED = "unassigned"


class PortOrigin(Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


DEFAULT_WIDTH = 40.0
DEFAULT_HEIGHT = 30.0


class InvalidGraphError(ValueError):
    """Raised when an operation receives input it cannot accept."""


@dataclass(frozen=True)
class Port:
    id: str
    owner: str
    side: PortSide = PortSide.UNASSIGNED
    model_order: int = 0
    origin: PortOrigin = PortOrigin.EXPLICIT


@dataclass(frozen=True)
class Node:
    id: str
    model_order: int
    group: int = 0
    kind: str = "node"
    children: Graph | None = None
    fixed_port_order: bool = False
    width: float = DEFAULT_WIDTH
    height: float = DEFAULT_HEIGHT
    is_dummy: bool = False
    ports: tuple[Port, ...] = ()

    @property
    def is_compound(self) -> bool:
        return self.children is not None

    def port(self, port_id: str) -> Port | None:
        for p in self.ports:
            if p.id == port_id:
                return p
        return None


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    model_order: int = 0
    source_port: str | None = None
    target_port: str | None = None
    priority_label: int | None = None
    reversed: bool = False
    # Declaration index under the source node; only meaningful before
    # derive_global_edge_order has run.
    local_index: int | None = None

    @property
    def is_self_loop(self) -> bool:
        return self.source == self.target

    @property
    def tail(self) -> str:
        """Upstream endpoint in layout direction (swapped when reversed)."""
        return self.target if self.reversed else self.source

    @property
    def head(self) -> str:
        return self.source if self.reversed else self.target

    @property
    def tail_port(self) -> str | None:
        return self.target_port if self.reversed else self.source_port

    @property
    def head_port(self) -> str | None:
        return self.source_port if self.reversed else self.target_port


@dataclass(frozen=True)
class Graph:
    nodes: tuple[Node, ...] = ()
    edges: tuple[Edge, ...] = ()
    direction: Direction = Direction.RIGHT

    def __post_init__(self) -> None:
        # Accept lists for convenience; store tuples so the value stays hashable-ish.
        if not isinstance(self.nodes, tuple):
            object.__setattr__(self, "nodes", tuple(self.nodes))
        if not isinstance(self.edges, tuple):
            object.__setattr__(self, "edges", tuple(self.edges))

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def node_map(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    def edges_by_order(self) -> list[Edge]:
        return sorted(self.edges, key=lambda e: (e.model_order, e.id))

    def with_edges(self, edges: Iterable[Edge]) -> Graph:
        return replace(self, edges=tuple(edges))

    def with_nodes(self, nodes: Iterable[Node]) -> Graph:
        return replace(self, nodes=tuple(nodes))


# --- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    @property
    def message(self) -> str:
        return repr(self)


@dataclass(frozen=True)
class DuplicateNodeId(Violation):
    node_id: str


@dataclass(frozen=True)
class DuplicateEdgeId(Violation):
    edge_id: str


@dataclass(frozen=True)
class DanglingEndpoint(Violation):
    edge_id: str
    node_id: str


@dataclass(frozen=True)
class DanglingPort(Violation):
    edge_id: str
    node_id: str
    port_id: str


@dataclass(frozen=True)
class NodeOrderMismatch(Violation):
    node_id: str
    position: int
    model_order: int


@dataclass(frozen=True)
class EdgeOrderNotDense(Violation):
    orders: tuple[int, ...]


@dataclass(frozen=True)
class DuplicatePortId(Violation):
    node_id: str
    port_id: str


@dataclass(frozen=True)
class PortOwnerMismatch(Violation):
    node_id: str
    port_id: str
    owner: str


@dataclass(frozen=True)
class ReversedOnInput(Violation):
    edge_id: str


@dataclass(frozen=True)
class DummyOnInput(Violation):
    node_id: str


@dataclass(frozen=True)
class InChild(Violation):
    """Wraps a violation found inside a compound node's child graph."""

    parent_id: str
    inner: Violation


def validate(graph: Graph, parent: Node | None = None) -> list[Violation]:
    """Check every graph invariant and return the violations found.

    ``parent`` is the compound node owning ``graph``; edges inside a child
    graph may use the parent's id together with one of its ports to reach
    the compound's interface.
    """
    out: list[Violation] = []
    seen: set[str] = set()
    for pos, node in enumerate(graph.nodes):
        if node.id in seen:
            out.append(DuplicateNodeId(node.id))
        seen.add(node.id)
        if node.model_order != pos:
            out.append(NodeOrderMismatch(node.id, pos, node.model_order))
        if node.is_dummy:
            out.append(DummyOnInput(node.id))
        port_ids: set[str] = set()
        for p in node.ports:
            if p.id in port_ids:
                out.append(DuplicatePortId(node.id, p.id))
            port_ids.add(p.id)
            if p.owner != node.id:
                out.append(PortOwnerMismatch(node.id, p.id, p.owner))
        if node.children is not None:
            out.extend(InChild(node.id, v) for v in validate(node.children, node))

    nodes = graph.node_map()
    edge_ids: set[str] = set()
    for e in graph.edges:
        if e.id in edge_ids:
            out.append(DuplicateEdgeId(e.id))
        edge_ids.add(e.id)
        if e.reversed:
            out.append(ReversedOnInput(e.id))
        for end, port_id in ((e.source, e.source_port), (e.target, e.target_port)):
            owner = nodes.get(end)
            if owner is None and parent is not None and end == parent.id:
                owner = parent
            if owner is None:
                out.append(DanglingEndpoint(e.id, end))
            elif port_id is not None and owner.port(port_id) is None:
                out.append(DanglingPort(e.id, end, port_id))
            elif owner is parent and port_id is None:
                # the interface can only be reached through a declared port
                out.append(DanglingPort(e.id, end, ""))

    orders = sorted(e.model_order for e in graph.edges)
    if orders != list(range(len(orders))):
        out.append(EdgeOrderNotDense(tuple(orders)))
    return out


class GraphValidationError(InvalidGraphError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(repr(v) for v in violations))


def ensure_valid(graph: Graph) -> Graph:
    violations = validate(graph)
    if violations:
        raise GraphValidationError(violations)
    return graph


# --- order derivation ---------------------------------------------------------


def derive_global_edge_order(graph: Graph) -> Graph:
    """Assign edge model orders from (source node order, local declaration index).

    Edges must carry ``local_index``; a repeated local index under the same
    source node is rejected.
    """
    node_order = {n.id: n.model_order for n in graph.nodes}
    seen: set[tuple[str, int]] = set()
    for e in graph.edges:
        if e.local_index is None:
            raise InvalidGraphError(f"edge {e.id!r} has no local declaration index")
        key = (e.source, e.local_index)
        if key in seen:
            raise InvalidGraphError(
                f"duplicate local index {e.local_index} under source {e.source!r}"
            )
        seen.add(key)
        if e.source not in node_order:
            raise InvalidGraphError(f"edge {e.id!r} has unknown source {e.source!r}")

    ranked = sorted(graph.edges, key=lambda e: (node_order[e.source], e.local_index))
    new_order = {e.id: i for i, e in enumerate(ranked)}
    return graph.with_edges(replace(e, model_order=new_order[e.id]) for e in graph.edges)


def implicit_port_id(edge: Edge, end: str) -> str:
    return f"{edge.id}.{end}"


def synthesize_implicit_ports(graph: Graph) -> Graph:
    """Create an IMPLICIT port for every edge endpoint without a port reference.

    The port's model order is the incident edge's model order. Implicit ports
    are appended after a node's explicit ports, sorted by that order.
    """
    new_ports: dict[str, list[Port]] = {}
    edges: list[Edge] = []
    for e in graph.edges:
        src_port, tgt_port = e.source_port, e.target_port
        if src_port is None:
            src_port = implicit_port_id(e, "src")
            new_ports.setdefault(e.source, []).append(
                Port(src_port, e.source, PortSide.UNASSIGNED, e.model_order, PortOrigin.IMPLICIT)
            )
        if tgt_port is None:
            tgt_port = implicit_port_id(e, "tgt")
            new_ports.setdefault(e.target, []).append(
                Port(tgt_port, e.target, PortSide.UNASSIGNED, e.model_order, PortOrigin.IMPLICIT)
            )
        edges.append(replace(e, source_port=src_port, target_port=tgt_port))

    nodes = []
    for n in graph.nodes:
        extra = sorted(new_ports.get(n.id, ()), key=lambda p: (p.model_order, p.id))
        nodes.append(replace(n, ports=n.ports + tuple(extra)) if extra else n)
    return replace(graph, nodes=tuple(nodes), edges=tuple(edges))


def strip_implicit_ports(graph: Graph) -> Graph:
    """Inverse of :func:`synthesize_implicit_ports`."""
    implicit: set[tuple[str, str]] = set()
    nodes = []
    for n in graph.nodes:
        for p in n.ports:
            if p.origin is PortOrigin.IMPLICIT:
                implicit.add((n.id, p.id))
        kept = tuple(p for p in n.ports if p.origin is PortOrigin.EXPLICIT)
        nodes.append(replace(n, ports=kept) if len(kept) != len(n.ports) else n)
    edges = []
    for e in graph.edges:
        sp = None if (e.source, e.source_port) in implicit else e.source_port
        tp = None if (e.target, e.target_port) in implicit else e.target_port
        edges.append(replace(e, source_port=sp, target_port=tp))
    return replace(graph, nodes=tuple(nodes), edges=tuple(edges))


def reset_reversals(graph: Graph) -> Graph:
    return graph.with_edges(replace(e, reversed=False) if e.reversed else e for e in graph.edges)


def non_loop_edges(graph: Graph) -> list[Edge]:
    return [e for e in graph.edges if not e.is_self_loop]


def is_acyclic(graph: Graph) -> bool:
    """Kahn's algorithm over effective (tail, head) directions, self-loops ignored."""
    indeg = {n.id: 0 for n in graph.nodes}
    succ: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    for e in non_loop_edges(graph):
        succ[e.tail].append(e.head)
        indeg[e.head] += 1
    stack = [n for n, d in indeg.items() if d == 0]
    seen = 0
    while stack:
        v = stack.pop()
        seen += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
    return seen == len(indeg)


__all__ = [
    "Direction",
    "PortSide",
    "PortOrigin",
    "Port",
    "Node",
    "Edge",
    "Graph",
    "Violation",
    "DuplicateNodeId",
    "DuplicateEdgeId",
    "DanglingEndpoint",
    "DanglingPort",
    "NodeOrderMismatch",
    "EdgeOrderNotDense",
    "DuplicatePortId",
    "PortOwnerMismatch",
    "ReversedOnInput",
    "DummyOnInput",
    "InChild",
    "InvalidGraphError",
    "GraphValidationError",
    "validate",
    "ensure_valid",
    "derive_global_edge_order",
    "synthesize_implicit_ports",
    "strip_implicit_ports",
    "reset_reversals",
    "non_loop_edges",
    "is_acyclic",
]
