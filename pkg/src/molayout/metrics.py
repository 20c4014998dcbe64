"""Layout quality measures: crossings, backward edges, inversions, stability."""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any, Hashable, Iterable, Sequence

if TYPE_CHECKING:
    from .geometry import LayoutResult
    from .graph import Graph
    from .layering import Layering
    from .ordering import LayerOrders


# --- primitives ---------------------------------------------------------------


def inversion_count(values: Sequence[Any]) -> int:
    """Number of pairs i < j with values[i] > values[j]."""
    seen: list[Any] = []
    total = 0
    for i, v in enumerate(values):
        j = bisect.bisect_right(seen, v)
        total += i - j
        seen.insert(j, v)
    return total


def pair_crossings(pairs: Iterable[tuple[Any, Any]]) -> int:
    """Crossings among straight segments between two parallel lines.

    Each pair is (tail key, head key). Two segments cross iff their tail and
    head keys are ordered strictly in opposite directions; shared endpoints
    never cross.
    """
    ordered = sorted(pairs)
    if len(ordered) < 2:
        return 0
    heads = sorted({h for _, h in ordered})
    rank = {h: i + 1 for i, h in enumerate(heads)}
    size = len(heads)
    tree = [0] * (size + 1)
    total = 0
    for seen, (_, h) in enumerate(ordered):
        r = rank[h]
        # how many earlier segments end at or before r
        s, i = 0, r
        while i > 0:
            s += tree[i]
            i -= i & -i
        total += seen - s
        i = r
        while i <= size:
            tree[i] += 1
            i += i & -i
    return total


# --- crossings ----------------------------------------------------------------


def _port_rank(orders: LayerOrders | None, node: str, port: str | None) -> int:
    if orders is None or port is None:
        return 0
    sides = orders.ports.get(node)
    if not sides:
        return 0
    for ids in sides.values():
        if port in ids:
            return ids.index(port)
    return 0


def count_crossings(orders: LayerOrders, layering: Layering, graph: Graph) -> int:
    """Sum of pairwise crossings over adjacent layer pairs of a unit-span graph.

    Endpoint positions are (in-layer index, port rank); port order therefore
    decides between edges sharing a node.
    """
    pos = {v: i for layer in orders.layers for i, v in enumerate(layer)}
    per_layer: dict[int, list[tuple[tuple[int, int], tuple[int, int]]]] = {}
    for e in graph.edges:
        if e.is_self_loop:
            continue
        t, h = e.tail, e.head
        key_t = (pos[t], _port_rank(orders, t, e.tail_port))
        key_h = (pos[h], _port_rank(orders, h, e.head_port))
        per_layer.setdefault(layering.layer_of[t], []).append((key_t, key_h))
    return sum(pair_crossings(p) for p in per_layer.values())


# --- inversions ---------------------------------------------------------------


class InversionScope(Enum):
    NODES_IN_LAYER = "nodes-in-layer"
    EDGES_AT_PORT = "edges-at-port"
    GLOBAL_EDGES = "global-edges"


def grouped_inversions(order: Sequence[Hashable], key: dict, group: dict | None = None) -> int:
    """Inversions of ``order`` against ``key``; with ``group`` only same-group pairs count."""
    if group is None:
        return inversion_count([key[v] for v in order])
    buckets: dict[Any, list[Any]] = {}
    for v in order:
        buckets.setdefault(group[v], []).append(key[v])
    return sum(inversion_count(b) for b in buckets.values())


def node_inversions(
    orders: LayerOrders, graph: Graph, group_restricted: bool = False, skip: Iterable[str] = ()
) -> int:
    nodes = {n.id: n for n in graph.nodes if not n.is_dummy}
    skipped = set(skip)
    total = 0
    for layer in orders.layers:
        real = [v for v in layer if v in nodes and v not in skipped]
        key = {v: nodes[v].model_order for v in real}
        group = {v: nodes[v].group for v in real} if group_restricted else None
        total += grouped_inversions(real, key, group)
    return total


def port_edge_inversions(orders: LayerOrders, graph: Graph) -> int:
    """Per node side, pairs of edge-carrying ports placed against edge model order."""
    order_of_port: dict[tuple[str, str], int] = {}
    for e in graph.edges:
        for node, port in ((e.source, e.source_port), (e.target, e.target_port)):
            if port is not None:
                k = (node, port)
                order_of_port[k] = min(order_of_port.get(k, e.model_order), e.model_order)
    total = 0
    for node, sides in orders.ports.items():
        for ids in sides.values():
            keys = [order_of_port[(node, p)] for p in ids if (node, p) in order_of_port]
            total += inversion_count(keys)
    return total


def global_edge_inversions(orders: LayerOrders, layering: Layering, graph: Graph) -> int:
    """Per inter-layer gap, pairs of edge segments drawn against edge model order.

    Segments are ranked by (tail position, head position) and compared with
    their owning edge's model order.
    """
    pos = {v: i for layer in orders.layers for i, v in enumerate(layer)}
    gaps: dict[int, list[tuple[tuple[int, int], int]]] = {}
    for e in graph.edges:
        if e.is_self_loop:
            continue
        gaps.setdefault(layering.layer_of[e.tail], []).append(
            ((pos[e.tail], pos[e.head]), e.model_order)
        )
    total = 0
    for segs in gaps.values():
        segs.sort()
        total += inversion_count([mo for _, mo in segs])
    return total


def count_inversions(
    orders: LayerOrders,
    graph: Graph,
    scope: InversionScope,
    layering: Layering | None = None,
    group_restricted: bool = False,
) -> int:
    if scope is InversionScope.NODES_IN_LAYER:
        return node_inversions(orders, graph, group_restricted)
    if scope is InversionScope.EDGES_AT_PORT:
        return port_edge_inversions(orders, graph)
    if layering is None:
        raise ValueError("global edge inversions need the layering")
    return global_edge_inversions(orders, layering, graph)


# --- stability ----------------------------------------------------------------


@dataclass(frozen=True)
class Stability:
    displacement: float
    order_flips: int


def stability_distance(
    first: LayoutResult, second: LayoutResult, correspondence: dict[str, str] | None = None
) -> Stability | None:
    """Mean center displacement after origin normalization, plus in-layer order flips.

    ``correspondence`` maps node ids of ``first`` to ids of ``second``; by
    default nodes are matched by id. Returns None when no node is shared.
    """
    if correspondence is None:
        correspondence = {v: v for v in first.nodes if v in second.nodes}
    pairs = [(a, b) for a, b in correspondence.items() if a in first.nodes and b in second.nodes]
    if not pairs:
        return None

    ox1, oy1 = first.origin()
    ox2, oy2 = second.origin()
    dist = 0.0
    for a, b in pairs:
        ca, cb = first.nodes[a].center, second.nodes[b].center
        dist += math.hypot((ca[0] - ox1) - (cb[0] - ox2), (ca[1] - oy1) - (cb[1] - oy2))

    flips = 0
    for i in range(len(pairs)):
        a1, b1 = pairs[i]
        n1, m1 = first.nodes[a1], second.nodes[b1]
        for j in range(i + 1, len(pairs)):
            a2, b2 = pairs[j]
            n2, m2 = first.nodes[a2], second.nodes[b2]
            if n1.layer != n2.layer or m1.layer != m2.layer:
                continue
            if (n1.rank < n2.rank) != (m1.rank < m2.rank):
                flips += 1
    return Stability(dist / len(pairs), flips)


# --- report -------------------------------------------------------------------


@dataclass
class MetricsReport:
    crossings: int
    backward_edges: int
    node_inversions: int
    edge_inversions: int
    layer_count: int
    stability_distance: float | None = None
    order_flips: int | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        rows = [(k, "-" if v is None else (f"{v:.3f}" if isinstance(v, float) else str(v)))
                for k, v in asdict(self).items()]
        width = max(len(k) for k, _ in rows)
        lines = [f"{'metric':<{width}}  value", f"{'-' * width}  -----"]
        lines += [f"{k:<{width}}  {v}" for k, v in rows]
        return "\n".join(lines) + "\n"
