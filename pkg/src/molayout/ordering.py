"""Crossing minimization: in-layer node order and per-side port order.

Model order enters in four places:

* pre-order: each layer starts sorted by model order, dummies merged in by
  :func:`compare_dummy`;
* tie-break: equal barycenters fall back to model order (optionally only
  within an ordering group);
* secondary criterion: among visited orders with the fewest crossings the
  one with the fewest model-order inversions is kept;
* pinning: nodes of semantically ordered kinds (and, on request, all real
  nodes) keep their model order relative to each other.

``STRICT_MO`` stops after the pre-order.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable

from .graph import Direction, Edge, Graph, Node, PortOrigin, PortSide
from .layering import Layering
from .metrics import grouped_inversions, pair_crossings

TIE_EPS = 1e-9
MAX_SWEEPS = 8


class CrossMin(Enum):
    BARYCENTER = "barycenter"
    BARYCENTER_MO = "barycenter-mo"
    STRICT_MO = "strict-mo"


class PortPolicy(Enum):
    DERIVED_FROM_EDGES = "derived"
    FIXED_MODEL_ORDER = "fixed"


class DummyRule(Enum):
    FIRST_CONNECTION = "first"
    ALL_CONNECTIONS = "all"


@dataclass(frozen=True)
class CrossMinStrategy:
    method: CrossMin = CrossMin.BARYCENTER_MO
    group_restricted: bool = False
    port_policy: PortPolicy = PortPolicy.DERIVED_FROM_EDGES
    dummy_rule: DummyRule = DummyRule.FIRST_CONNECTION
    constrain_node_order: bool = False
    pinned_kinds: frozenset[str] = frozenset()
    max_sweeps: int = MAX_SWEEPS


@dataclass
class LayerOrders:
    layers: list[list[str]]
    # node id -> side -> port ids in order along the side
    ports: dict[str, dict[PortSide, list[str]]] = field(default_factory=dict)

    def positions(self) -> dict[str, int]:
        return {v: i for layer in self.layers for i, v in enumerate(layer)}

    def copy(self) -> LayerOrders:
        return LayerOrders(
            [list(layer) for layer in self.layers],
            {n: {s: list(p) for s, p in sides.items()} for n, sides in self.ports.items()},
        )


# --- port sides -----------------------------------------------------------------


def input_side(direction: Direction) -> PortSide:
    return PortSide.WEST if direction is Direction.RIGHT else PortSide.NORTH


def output_side(direction: Direction) -> PortSide:
    return PortSide.EAST if direction is Direction.RIGHT else PortSide.SOUTH


def free_side(direction: Direction) -> PortSide:
    """Side that carries self-loops: the one facing the next node in the layer."""
    return PortSide.SOUTH if direction is Direction.RIGHT else PortSide.EAST


def assign_port_sides(graph: Graph, direction: Direction) -> dict[tuple[str, str], PortSide]:
    """Side of every port: the declared one, else from the first incident edge.

    Uses the effective (possibly reversed) orientation, so a reversed edge
    leaves its original source on the input side.
    """
    sides: dict[tuple[str, str], PortSide] = {}
    for e in graph.edges_by_order():
        if e.is_self_loop:
            for port in (e.source_port, e.target_port):
                if port is not None:
                    sides.setdefault((e.source, port), free_side(direction))
            continue
        if e.tail_port is not None:
            sides.setdefault((e.tail, e.tail_port), output_side(direction))
        if e.head_port is not None:
            sides.setdefault((e.head, e.head_port), input_side(direction))
    for n in graph.nodes:
        for p in n.ports:
            if p.side is not PortSide.UNASSIGNED:
                sides[(n.id, p.id)] = p.side
            else:
                sides.setdefault((n.id, p.id), output_side(direction))
    return sides


def _fixed_sequence(node: Node, policy: PortPolicy) -> list[str]:
    if node.fixed_port_order or node.is_compound:
        explicit = [p.id for p in node.ports if p.origin is PortOrigin.EXPLICIT]
        implicit = sorted(
            (p for p in node.ports if p.origin is PortOrigin.IMPLICIT), key=lambda p: (p.model_order, p.id)
        )
        return explicit + [p.id for p in implicit]
    if policy is PortPolicy.FIXED_MODEL_ORDER:
        indexed = sorted(
            enumerate(node.ports),
            key=lambda ip: (ip[1].origin is PortOrigin.IMPLICIT, ip[1].model_order, ip[0]),
        )
        return [p.id for _, p in indexed]
    raise ValueError("derived port order has no fixed sequence")


def has_fixed_ports(node: Node, policy: PortPolicy) -> bool:
    return node.fixed_port_order or node.is_compound or policy is PortPolicy.FIXED_MODEL_ORDER


@dataclass(frozen=True)
class PortIncidence:
    """One edge segment at a port, seen from the node owning the port."""

    neighbor_position: float
    backward: bool
    edge_order: int


def order_ports(
    node: Node,
    policy: PortPolicy,
    sides: dict[str, PortSide],
    incidences: dict[str, list[PortIncidence]] | None = None,
) -> dict[PortSide, list[str]]:
    """Order a node's ports along each side.

    With a fixed policy (or a fixed-port-order node) ports follow model order
    and neighbors are ignored. Otherwise ports are sorted by the mean position
    of their neighbors in the adjacent layer, then forward before backward
    edges, then edge model order.
    """
    if has_fixed_ports(node, policy):
        seq = _fixed_sequence(node, policy)
    else:
        incidences = incidences or {}
        by_id = {p.id: p for p in node.ports}

        def key(port_id: str) -> tuple:
            inc = incidences.get(port_id, [])
            if not inc:
                return (float("inf"), True, by_id[port_id].model_order, port_id)
            mean = sum(i.neighbor_position for i in inc) / len(inc)
            return (
                mean,
                any(i.backward for i in inc),
                min(i.edge_order for i in inc),
                port_id,
            )

        seq = sorted((p.id for p in node.ports), key=key)

    out: dict[PortSide, list[str]] = {}
    for pid in seq:
        out.setdefault(sides[pid], []).append(pid)
    return out


# --- layer context --------------------------------------------------------------


@dataclass
class LayerContext:
    """Per-graph lookup tables shared by the ordering steps."""

    graph: Graph
    layering: Layering
    strategy: CrossMinStrategy
    preds: dict[str, list[tuple[str, Edge]]]
    succs: dict[str, list[tuple[str, Edge]]]
    model_key: dict[str, tuple[int, int]]
    group: dict[str, int]
    pin_class: dict[str, tuple | None]
    # predetermined port rank offset in (-1/2, 1/2) for fixed-order ports
    port_offset: dict[tuple[str, str], Fraction]
    port_rank: dict[tuple[str, str], int]

    def is_dummy(self, v: str) -> bool:
        return self.layering.is_dummy(v)


def build_context(
    graph: Graph,
    layering: Layering,
    strategy: CrossMinStrategy,
    port_sides: dict[tuple[str, str], PortSide] | None = None,
) -> LayerContext:
    preds: dict[str, list[tuple[str, Edge]]] = {v: [] for v in layering.layer_of}
    succs: dict[str, list[tuple[str, Edge]]] = {v: [] for v in layering.layer_of}
    for e in graph.edges:
        if e.is_self_loop:
            continue
        preds[e.head].append((e.tail, e))
        succs[e.tail].append((e.head, e))
    for lst in (*preds.values(), *succs.values()):
        lst.sort(key=lambda te: (te[1].model_order, te[1].id))

    nodes = graph.node_map()
    model_key: dict[str, tuple[int, int]] = {}
    group: dict[str, int] = {}
    pin_class: dict[str, tuple | None] = {}
    for v in layering.layer_of:
        info = layering.dummy_info.get(v)
        if info is not None:
            model_key[v] = (info.source_order, info.edge_order)
            group[v] = info.group
            pin_class[v] = None
            continue
        n = nodes[v]
        model_key[v] = (n.model_order, -1)
        group[v] = n.group
        if n.kind in strategy.pinned_kinds:
            pin_class[v] = ("kind", n.kind)
        elif strategy.constrain_node_order:
            pin_class[v] = ("group", n.group) if strategy.group_restricted else ("all",)
        else:
            pin_class[v] = None

    port_offset: dict[tuple[str, str], Fraction] = {}
    port_rank: dict[tuple[str, str], int] = {}
    if port_sides is not None:
        for n in graph.nodes:
            if n.is_dummy or not n.ports or not has_fixed_ports(n, strategy.port_policy):
                continue
            per_side: dict[PortSide, list[str]] = {}
            for pid in _fixed_sequence(n, strategy.port_policy):
                per_side.setdefault(port_sides[(n.id, pid)], []).append(pid)
            for ids in per_side.values():
                k = len(ids)
                for r, pid in enumerate(ids):
                    port_rank[(n.id, pid)] = r
                    port_offset[(n.id, pid)] = Fraction(r + 1, k + 1) - Fraction(1, 2)

    return LayerContext(
        graph, layering, strategy, preds, succs, model_key, group, pin_class, port_offset, port_rank
    )


def _compare_keys(a, b) -> int:
    return (a > b) - (a < b)


def _anchor(v: str, ctx: LayerContext, prev_position: dict[str, int], rule: DummyRule) -> float | None:
    positions = [prev_position[u] for u, _ in ctx.preds.get(v, ()) if u in prev_position]
    if not positions:
        return None
    if rule is DummyRule.FIRST_CONNECTION:
        return positions[0]
    return statistics.median(positions)


def compare_dummy(
    a: str, b: str, ctx: LayerContext, prev_position: dict[str, int], rule: DummyRule | None = None
) -> int:
    """Order two elements of one layer by their connection to the previous layer.

    FIRST_CONNECTION looks at each element's first incoming edge (lowest edge
    model order); ALL_CONNECTIONS uses the median over all incoming edges.
    Ties and elements without predecessors fall back to model order, where a
    dummy carries its edge's declaring node and edge order.
    Returns a negative number when ``a`` goes first.
    """
    rule = rule or ctx.strategy.dummy_rule
    pa = _anchor(a, ctx, prev_position, rule)
    pb = _anchor(b, ctx, prev_position, rule)
    if pa is not None and pb is not None and pa != pb:
        return -1 if pa < pb else 1
    return _compare_keys(ctx.model_key[a], ctx.model_key[b])


def _merge(reals: list[str], dummies: list[str], before: Callable[[str, str], bool]) -> list[str]:
    out: list[str] = []
    i = j = 0
    while i < len(reals) and j < len(dummies):
        if before(dummies[j], reals[i]):
            out.append(dummies[j])
            j += 1
        else:
            out.append(reals[i])
            i += 1
    out.extend(reals[i:])
    out.extend(dummies[j:])
    return out


def pin(order: list[str], ctx: LayerContext) -> list[str]:
    """Restore model order among members of each pin class, keeping their slots."""
    classes: dict[tuple, list[int]] = {}
    for i, v in enumerate(order):
        c = ctx.pin_class.get(v)
        if c is not None:
            classes.setdefault(c, []).append(i)
    if not classes:
        return order
    out = list(order)
    for slots in classes.values():
        members = sorted((order[i] for i in slots), key=ctx.model_key.__getitem__)
        for i, v in zip(slots, members):
            out[i] = v
    return out


def preorder_by_model_order(ctx: LayerContext) -> LayerOrders:
    """Sort real nodes by model order and merge dummies in with :func:`compare_dummy`.

    Dummies are first sorted among themselves by their edge's model order.
    """
    layers: list[list[str]] = []
    prev_position: dict[str, int] = {}
    for layer in ctx.layering.layers:
        reals = sorted((v for v in layer if not ctx.is_dummy(v)), key=ctx.model_key.__getitem__)
        dummies = sorted(
            (v for v in layer if ctx.is_dummy(v)),
            key=lambda d: (ctx.layering.dummy_info[d].edge_order, d),
        )
        merged = _merge(reals, dummies, lambda d, r: compare_dummy(d, r, ctx, prev_position) < 0)
        merged = pin(merged, ctx)
        layers.append(merged)
        prev_position = {v: i for i, v in enumerate(merged)}
    return LayerOrders(layers)


# --- barycenter -----------------------------------------------------------------


def layer_crossings(layers: list[list[str]], ctx: LayerContext) -> int:
    pos = {v: i for layer in layers for i, v in enumerate(layer)}
    gaps: dict[int, list] = {}
    rank = ctx.port_rank
    for e in ctx.graph.edges:
        if e.is_self_loop:
            continue
        t, h = e.tail, e.head
        kt = (pos[t], rank.get((t, e.tail_port), 0))
        kh = (pos[h], rank.get((h, e.head_port), 0))
        gaps.setdefault(ctx.layering.layer_of[t], []).append((kt, kh))
    return sum(pair_crossings(p) for p in gaps.values())


def layer_inversions(layers: list[list[str]], ctx: LayerContext) -> int:
    total = 0
    for layer in layers:
        real = [v for v in layer if not ctx.is_dummy(v)]
        group = ctx.group if ctx.strategy.group_restricted else None
        total += grouped_inversions(real, ctx.model_key, group)
    return total


def _barycenters(
    layer: list[str], fixed: list[str], neighbors: dict[str, list[tuple[str, Edge]]], ctx: LayerContext, downward: bool
) -> dict[str, Fraction | None]:
    pos = {v: i for i, v in enumerate(fixed)}
    out: dict[str, Fraction | None] = {}
    for v in layer:
        vals = []
        for u, e in neighbors.get(v, ()):
            if u not in pos:
                continue
            port = e.tail_port if downward else e.head_port
            vals.append(pos[u] + ctx.port_offset.get((u, port), Fraction(0)))
        out[v] = Fraction(sum(vals)) / len(vals) if vals else None
    return out


def _break_ties(block: list[str], ctx: LayerContext, model_order_mode: bool) -> list[str]:
    if not model_order_mode or len(block) < 2:
        return block
    if not ctx.strategy.group_restricted:
        return sorted(block, key=ctx.model_key.__getitem__)
    out = list(block)
    slots: dict[int, list[int]] = {}
    for i, v in enumerate(block):
        slots.setdefault(ctx.group[v], []).append(i)
    for idx in slots.values():
        members = sorted((block[i] for i in idx), key=ctx.model_key.__getitem__)
        for i, v in zip(idx, members):
            out[i] = v
    return out


def sort_layer(
    layer: list[str],
    bary: dict[str, Fraction | None],
    ctx: LayerContext,
    model_order_mode: bool,
) -> list[str]:
    """Barycenter sort of one layer; nodes without neighbors keep their slots."""
    current = {v: i for i, v in enumerate(layer)}
    movable = sorted((v for v in layer if bary[v] is not None), key=lambda v: (bary[v], current[v]))

    ordered: list[str] = []
    block: list[str] = []
    for v in movable:
        if block and abs(float(bary[v] - bary[block[-1]])) > TIE_EPS:
            ordered.extend(_break_ties(block, ctx, model_order_mode))
            block = []
        block.append(v)
    ordered.extend(_break_ties(block, ctx, model_order_mode))

    it = iter(ordered)
    result = [v if bary[v] is None else next(it) for v in layer]
    return pin(result, ctx)


def barycenter_sweep(ctx: LayerContext, orders: LayerOrders, model_order_mode: bool) -> LayerOrders:
    """Alternating down/up barycenter sweeps, returning the best order seen.

    "Best" is fewest crossings; in model-order mode ties go to the order with
    fewer model-order inversions. The starting order is a candidate, so the
    result never has more crossings than the input.
    """
    current = [list(layer) for layer in orders.layers]

    def score(layers: list[list[str]]) -> tuple[int, int]:
        c = layer_crossings(layers, ctx)
        return (c, layer_inversions(layers, ctx) if model_order_mode else 0)

    best_score = score(current)
    best = [list(layer) for layer in current]
    n = len(current)
    for _ in range(ctx.strategy.max_sweeps):
        improved = False
        for downward in (True, False):
            indices: Iterable[int] = range(1, n) if downward else range(n - 2, -1, -1)
            for i in indices:
                fixed = current[i - 1] if downward else current[i + 1]
                neighbors = ctx.preds if downward else ctx.succs
                bary = _barycenters(current[i], fixed, neighbors, ctx, downward)
                current[i] = sort_layer(current[i], bary, ctx, model_order_mode)
            s = score(current)
            if s < best_score:
                best_score = s
                best = [list(layer) for layer in current]
                improved = True
        if not improved:
            break
    return LayerOrders(best, dict(orders.ports))


# --- entry point ----------------------------------------------------------------


def assign_port_orders(
    ctx: LayerContext, orders: LayerOrders, port_sides: dict[tuple[str, str], PortSide]
) -> LayerOrders:
    result = LayerOrders([list(layer) for layer in orders.layers])
    pos = orders.positions()
    incid: dict[str, dict[str, list[PortIncidence]]] = {}
    for e in ctx.graph.edges:
        if e.is_self_loop:
            continue
        if e.tail_port is not None:
            incid.setdefault(e.tail, {}).setdefault(e.tail_port, []).append(
                PortIncidence(pos[e.head], e.reversed, e.model_order)
            )
        if e.head_port is not None:
            incid.setdefault(e.head, {}).setdefault(e.head_port, []).append(
                PortIncidence(pos[e.tail], e.reversed, e.model_order)
            )
    for n in ctx.graph.nodes:
        if n.is_dummy or not n.ports:
            continue
        sides = {p.id: port_sides[(n.id, p.id)] for p in n.ports}
        result.ports[n.id] = order_ports(n, ctx.strategy.port_policy, sides, incid.get(n.id))
    return result


def minimize_crossings(
    graph: Graph,
    layering: Layering,
    strategy: CrossMinStrategy,
    port_sides: dict[tuple[str, str], PortSide] | None = None,
) -> tuple[LayerOrders, LayerOrders]:
    """Return (initial order, final order with port orders) for a unit-span graph."""
    if port_sides is None:
        port_sides = assign_port_sides(graph, graph.direction)
    ctx = build_context(graph, layering, strategy, port_sides)
    if strategy.method is CrossMin.BARYCENTER:
        initial = LayerOrders([pin(list(layer), ctx) for layer in layering.layers])
        final = barycenter_sweep(ctx, initial, model_order_mode=False)
    else:
        initial = preorder_by_model_order(ctx)
        if strategy.method is CrossMin.STRICT_MO:
            final = initial
        else:
            final = barycenter_sweep(ctx, initial, model_order_mode=True)
    return initial, assign_port_orders(ctx, final, port_sides)
