"""Cycle breaking: pick edges to reverse so the graph becomes acyclic.

Four strategies differ in how much they trust node model order:

* ``STRICT_MO`` reverses exactly the edges pointing against model order.
* ``DEPTH_FIRST_MO`` reverses DFS back edges, visiting in model order.
* ``SCC_MO`` applies the strict rule inside each strongly connected component.
* ``GREEDY`` is Eades-Lin-Smyth source/sink peeling with model-order ties.

Self-loops are never reversed. The only change to the graph is the
``reversed`` flag on the chosen edges.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .graph import Edge, Graph, non_loop_edges


class CycleBreakStrategy(Enum):
    GREEDY = "greedy"
    DEPTH_FIRST_MO = "depth-first-mo"
    STRICT_MO = "strict-mo"
    SCC_MO = "scc-mo"


@dataclass(frozen=True)
class ReversalSet:
    reversed_edges: frozenset[str]
    graph: Graph

    def __len__(self) -> int:
        return len(self.reversed_edges)


def _apply(graph: Graph, chosen: set[str]) -> ReversalSet:
    edges = tuple(replace(e, reversed=True) if e.id in chosen else e for e in graph.edges)
    return ReversalSet(frozenset(chosen), replace(graph, edges=edges))


def _order(graph: Graph) -> dict[str, int]:
    return {n.id: n.model_order for n in graph.nodes}


def strict_model_order(graph: Graph) -> ReversalSet:
    mo = _order(graph)
    chosen = {e.id for e in non_loop_edges(graph) if mo[e.source] > mo[e.target]}
    return _apply(graph, chosen)


def depth_first_model_order(graph: Graph) -> ReversalSet:
    mo = _order(graph)
    edges = non_loop_edges(graph)
    out: dict[str, list[Edge]] = {n.id: [] for n in graph.nodes}
    indeg = {n.id: 0 for n in graph.nodes}
    for e in edges:
        out[e.source].append(e)
        indeg[e.target] += 1
    for lst in out.values():
        lst.sort(key=lambda e: (mo[e.target], e.model_order))

    by_order = sorted(graph.nodes, key=lambda n: n.model_order)
    roots = [n.id for n in by_order if indeg[n.id] == 0] + [
        n.id for n in by_order if indeg[n.id] > 0
    ]

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n.id: WHITE for n in graph.nodes}
    chosen: set[str] = set()
    for root in roots:
        if color[root] != WHITE:
            continue
        color[root] = GRAY
        stack = [(root, iter(out[root]))]
        while stack:
            v, it = stack[-1]
            advanced = False
            for e in it:
                w = e.target
                if color[w] == GRAY:
                    chosen.add(e.id)
                elif color[w] == WHITE:
                    color[w] = GRAY
                    stack.append((w, iter(out[w])))
                    advanced = True
                    break
            if not advanced:
                color[v] = BLACK
                stack.pop()
    return _apply(graph, chosen)


def strongly_connected_components(graph: Graph) -> list[list[str]]:
    """Tarjan's algorithm, iterative. Components come out in reverse topological order."""
    succ: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    for e in non_loop_edges(graph):
        succ[e.source].append(e.target)

    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    comps: list[list[str]] = []
    counter = 0
    for start in (n.id for n in sorted(graph.nodes, key=lambda n: n.model_order)):
        if start in index:
            continue
        work = [(start, 0)]
        while work:
            v, i = work[-1]
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if w not in index:
                    work.append((w, 0))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def scc_model_order(graph: Graph) -> ReversalSet:
    mo = _order(graph)
    comp_of: dict[str, int] = {}
    for i, comp in enumerate(strongly_connected_components(graph)):
        for v in comp:
            comp_of[v] = i
    chosen: set[str] = set()
    for e in non_loop_edges(graph):
        # orienting an SCC's edges by a total node order leaves it acyclic,
        # so a single pass suffices
        if comp_of[e.source] == comp_of[e.target] and mo[e.source] > mo[e.target]:
            chosen.add(e.id)
    return _apply(graph, chosen)


def greedy(graph: Graph) -> ReversalSet:
    mo = _order(graph)
    edges = non_loop_edges(graph)
    outdeg = {n.id: 0 for n in graph.nodes}
    indeg = {n.id: 0 for n in graph.nodes}
    succ: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    pred: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    for e in edges:
        outdeg[e.source] += 1
        indeg[e.target] += 1
        succ[e.source].append(e.target)
        pred[e.target].append(e.source)

    active = set(outdeg)
    head: list[str] = []
    tail: list[str] = []

    def remove(v: str) -> None:
        active.discard(v)
        for w in succ[v]:
            if w in active:
                indeg[w] -= 1
        for u in pred[v]:
            if u in active:
                outdeg[u] -= 1

    while active:
        sinks = [v for v in active if outdeg[v] == 0]
        if sinks:
            v = min(sinks, key=mo.__getitem__)
            tail.append(v)
            remove(v)
            continue
        sources = [v for v in active if indeg[v] == 0]
        if sources:
            v = min(sources, key=mo.__getitem__)
            head.append(v)
            remove(v)
            continue
        v = min(active, key=lambda v: (-(outdeg[v] - indeg[v]), mo[v]))
        head.append(v)
        remove(v)

    position = {v: i for i, v in enumerate(head + tail[::-1])}
    chosen = {e.id for e in edges if position[e.source] > position[e.target]}
    return _apply(graph, chosen)


_STRATEGIES = {
    CycleBreakStrategy.GREEDY: greedy,
    CycleBreakStrategy.DEPTH_FIRST_MO: depth_first_model_order,
    CycleBreakStrategy.STRICT_MO: strict_model_order,
    CycleBreakStrategy.SCC_MO: scc_model_order,
}


def break_cycles(graph: Graph, strategy: CycleBreakStrategy) -> ReversalSet:
    return _STRATEGIES[strategy](graph)
