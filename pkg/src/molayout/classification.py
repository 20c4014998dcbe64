"""Which orderings carry meaning and which are free.

A classification marks element classes (node kinds, edge kinds, port kinds)
as ``SEMANTIC_FIXED`` or ``CONVENTION_FREE`` and maps node kinds to ordering
groups. Fixed node kinds become pinned kinds for crossing minimization, so
their relative in-layer order always equals model order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .config import LayoutConfig
    from .graph import Graph


class OrderClass(Enum):
    SEMANTIC_FIXED = "semantic-fixed"
    CONVENTION_FREE = "convention-free"


@dataclass(frozen=True)
class OrderClassification:
    node_kinds: dict[str, OrderClass] = field(default_factory=dict)
    edge_kinds: dict[str, OrderClass] = field(default_factory=dict)
    port_kinds: dict[str, OrderClass] = field(default_factory=dict)
    # node kind -> ordering group, used when a node has no explicit group
    groups: dict[str, int] = field(default_factory=dict)
    default: OrderClass = OrderClass.CONVENTION_FREE

    def node_class(self, kind: str) -> OrderClass:
        return self.node_kinds.get(kind, self.default)

    def edge_class(self, kind: str = "edge") -> OrderClass:
        return self.edge_kinds.get(kind, self.default)

    def port_class(self, kind: str) -> OrderClass:
        return self.port_kinds.get(kind, self.default)

    def pinned_kinds(self) -> frozenset[str]:
        return frozenset(k for k, c in self.node_kinds.items() if c is OrderClass.SEMANTIC_FIXED)

    def group_of(self, kind: str, explicit: int | None = None) -> int:
        if explicit is not None:
            return explicit
        return self.groups.get(kind, 0)

    def configure(self, config: LayoutConfig) -> LayoutConfig:
        """Add this classification's pinned kinds to ``config``."""
        return replace(config, pinned_kinds=config.pinned_kinds | self.pinned_kinds())

    def apply_groups(self, graph: Graph) -> Graph:
        """Assign groups from kinds to every node still in group 0."""
        nodes = []
        for n in graph.nodes:
            children = self.apply_groups(n.children) if n.children is not None else None
            group = n.group or self.groups.get(n.kind, 0)
            nodes.append(replace(n, group=group, children=children))
        return replace(graph, nodes=tuple(nodes))


def statechart() -> OrderClassification:
    """Transition order is priority, so edges are fixed; states are free."""
    return OrderClassification(edge_kinds={"edge": OrderClass.SEMANTIC_FIXED})


def dataflow() -> OrderClassification:
    """Reaction order is scheduling order; reactor interfaces are contracts.

    Everything else (reactors, timers, actions, plain edges) is free; that
    default is a choice, not something the languages mandate.
    """
    return OrderClassification(
        node_kinds={"reaction": OrderClass.SEMANTIC_FIXED},
        port_kinds={"explicit": OrderClass.SEMANTIC_FIXED},
        groups={"reactor": 0, "reaction": 1, "action": 2, "timer": 3, "state": 4},
    )
