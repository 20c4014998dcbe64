"""Layer assignment and dummy-node insertion.

Longest-path layering from sources, followed by one pull-up pass that moves
predecessor-free nodes next to their closest successor.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .graph import Edge, Graph, InvalidGraphError, Node, non_loop_edges


class CycleError(InvalidGraphError):
    pass


@dataclass(frozen=True)
class DummyInfo:
    edge_id: str
    edge_order: int
    # model order of the node that declared the edge (original source)
    source_order: int
    group: int = 0


@dataclass
class Layering:
    layer_of: dict[str, int]
    layers: list[list[str]]
    dummy_chains: dict[str, list[str]] = field(default_factory=dict)
    dummy_info: dict[str, DummyInfo] = field(default_factory=dict)
    # segment id -> original edge id (unit edges map to themselves)
    segment_owner: dict[str, str] = field(default_factory=dict)

    @property
    def layer_count(self) -> int:
        return len(self.layers)

    def is_dummy(self, node_id: str) -> bool:
        return node_id in self.dummy_info


def _layers_from(layer_of: dict[str, int], order: list[str]) -> list[list[str]]:
    count = max(layer_of.values(), default=-1) + 1
    layers: list[list[str]] = [[] for _ in range(count)]
    for v in order:
        layers[layer_of[v]].append(v)
    return layers


def assign_layers(
    graph: Graph,
    pinned_first: frozenset[str] = frozenset(),
    pinned_last: frozenset[str] = frozenset(),
) -> Layering:
    """Longest-path layering over the effective (tail -> head) edge directions.

    ``pinned_first``/``pinned_last`` name nodes held in the first/final layer
    (interface ports entering/leaving a compound node); both are exempt from
    pull-up and share their layer with no other node.
    """
    ids = [n.id for n in sorted(graph.nodes, key=lambda n: n.model_order)]
    succ: dict[str, list[str]] = {v: [] for v in ids}
    pred: dict[str, list[str]] = {v: [] for v in ids}
    indeg = {v: 0 for v in ids}
    for e in non_loop_edges(graph):
        succ[e.tail].append(e.head)
        pred[e.head].append(e.tail)
        indeg[e.head] += 1

    topo: list[str] = []
    ready = [v for v in ids if indeg[v] == 0]
    ready.reverse()
    while ready:
        v = ready.pop()
        topo.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if len(topo) != len(ids):
        raise CycleError("layer assignment requires an acyclic graph")

    layer_of: dict[str, int] = {}
    for v in topo:
        layer_of[v] = max((layer_of[u] + 1 for u in pred[v]), default=0)

    for v in topo:
        if not pred[v] and succ[v] and v not in pinned_last and v not in pinned_first:
            layer_of[v] = min(layer_of[w] for w in succ[v]) - 1

    if pinned_first and any(layer_of[v] == 0 and v not in pinned_first for v in ids):
        for v in ids:
            if v not in pinned_first:
                layer_of[v] += 1

    if pinned_last:
        last = max(layer_of.values(), default=0)
        if any(layer_of[v] == last and v not in pinned_last for v in ids):
            last += 1
        for v in pinned_last:
            layer_of[v] = last

    return Layering(layer_of, _layers_from(layer_of, ids))


def insert_dummies(graph: Graph, layering: Layering) -> tuple[Graph, Layering]:
    """Split every edge spanning k > 1 layers into a chain of k unit segments.

    Segments keep the original orientation and ``reversed`` flag so their
    tail/head follow the layout direction. Segment ids are ``<edge>#<i>``;
    dummy ids are ``<edge>~<i>``. Self-loops are dropped from the result.
    """
    nodes_by_id = graph.node_map()
    node_list: list[Node] = list(graph.nodes)
    layer_of = dict(layering.layer_of)
    order = [v for layer in layering.layers for v in layer]
    chains: dict[str, list[str]] = {}
    info: dict[str, DummyInfo] = {}
    segments: list[Edge] = []
    owner: dict[str, str] = {}

    for e in graph.edges:
        if e.is_self_loop:
            continue
        lt, lh = layer_of[e.tail], layer_of[e.head]
        if lh - lt <= 1:
            segments.append(e)
            owner[e.id] = e.id
            continue
        src = nodes_by_id[e.source]
        chain = []
        for k in range(1, lh - lt):
            d = f"{e.id}~{k}"
            chain.append(d)
            layer_of[d] = lt + k
            info[d] = DummyInfo(e.id, e.model_order, src.model_order, src.group)
            node_list.append(
                Node(d, len(node_list), group=src.group, kind="dummy", width=0.0, height=0.0, is_dummy=True)
            )
            order.append(d)
        chains[e.id] = chain
        path = [e.tail, *chain, e.head]
        for i in range(len(path) - 1):
            a, b = path[i], path[i + 1]
            first, last = i == 0, i == len(path) - 2
            if not e.reversed:
                seg = replace(
                    e,
                    id=f"{e.id}#{i}",
                    source=a,
                    target=b,
                    source_port=e.source_port if first else None,
                    target_port=e.target_port if last else None,
                )
            else:
                seg = replace(
                    e,
                    id=f"{e.id}#{i}",
                    source=b,
                    target=a,
                    source_port=e.source_port if last else None,
                    target_port=e.target_port if first else None,
                )
            segments.append(seg)
            owner[seg.id] = e.id

    new_graph = replace(graph, nodes=tuple(node_list), edges=tuple(segments))
    new_layering = Layering(layer_of, _layers_from(layer_of, order), chains, info, owner)
    return new_graph, new_layering


def fuse_dummies(layered: Graph, layering: Layering, original: Graph) -> Graph:
    """Drop dummy chains and restore the original edges (inverse of insertion)."""
    real = tuple(n for n in layered.nodes if not layering.is_dummy(n.id))
    keep = {layering.segment_owner.get(seg.id, seg.id) for seg in layered.edges}
    keep |= {e.id for e in original.edges if e.is_self_loop}
    edges = tuple(e for e in original.edges if e.id in keep)
    return replace(layered, nodes=real, edges=edges)
