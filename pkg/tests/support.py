"""Graph generators, brute-force oracles and shared example graphs."""

from __future__ import annotations

import itertools
import random
from dataclasses import replace

import numpy as np

from molayout.graph import Direction, Edge, Graph, Node, Port
from molayout.layering import Layering

SEND_RECEIVE = """\
chart ABRO {
  initial state Start
    -> Send [go]
    -> Receive
  state Send -> Join
  state Receive -> Join
  connector Join -> Done
  state Done -> Start
}
"""

# Receive declared before Send
RECEIVE_SEND = """\
chart ABRO {
  initial state Start
    -> Send [go]
    -> Receive
  state Receive -> Join
  state Send -> Join
  connector Join -> Done
  state Done -> Start
}
"""


def random_graph(rng: random.Random, n: int, m: int, self_loops: bool = True) -> Graph:
    nodes = tuple(Node(f"n{i}", i) for i in range(n))
    edges = []
    for j in range(m if n else 0):
        a, b = rng.randrange(n), rng.randrange(n)
        if a == b and not self_loops:
            continue
        edges.append(Edge(f"e{len(edges)}", f"n{a}", f"n{b}", len(edges)))
    return Graph(nodes, tuple(edges))


def shuffled_orders(rng: random.Random, graph: Graph) -> Graph:
    """Same topology, node list permuted (so model orders move)."""
    nodes = list(graph.nodes)
    rng.shuffle(nodes)
    return replace(graph, nodes=tuple(replace(n, model_order=i) for i, n in enumerate(nodes)))


def bilayer(rng: random.Random, n1: int, n2: int, m: int) -> tuple[Graph, Layering]:
    """Random two-layer graph; model orders are a random permutation of all nodes."""
    ids = [f"a{i}" for i in range(n1)] + [f"b{i}" for i in range(n2)]
    rng.shuffle(ids)
    nodes = tuple(Node(v, i) for i, v in enumerate(ids))
    top = [v for v in ids if v[0] == "a"]
    bottom = [v for v in ids if v[0] == "b"]
    pairs = [(rng.choice(top), rng.choice(bottom)) for _ in range(m)]
    # edges are declared under their source, in source model order
    order = {v: i for i, v in enumerate(ids)}
    pairs.sort(key=lambda p: order[p[0]])
    edges = tuple(Edge(f"e{k}", s, t, k) for k, (s, t) in enumerate(pairs))
    top_sorted = sorted(top, key=lambda v: v[1:])
    bottom_sorted = sorted(bottom, key=lambda v: v[1:])
    layer_of = {v: 0 for v in top} | {v: 1 for v in bottom}
    return Graph(nodes, edges), Layering(layer_of, [top_sorted, bottom_sorted])


def brute_crossings(edges: list[tuple[str, str]], pos: dict[str, int]) -> int:
    """O(E^2) pair formula: (a->b), (c->d) cross iff (pos a - pos c)(pos b - pos d) < 0."""
    total = 0
    for (a, b), (c, d) in itertools.combinations(edges, 2):
        if (pos[a] - pos[c]) * (pos[b] - pos[d]) < 0:
            total += 1
    return total


def brute_inversions(seq: list[int]) -> int:
    return sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])


class BilayerOracle:
    """Exhaustive enumeration of both layer permutations with numpy."""

    def __init__(self, graph: Graph, layering: Layering):
        self.top, self.bottom = layering.layers
        self.mo = {n.id: n.model_order for n in graph.nodes}
        ti = {v: i for i, v in enumerate(self.top)}
        bi = {v: i for i, v in enumerate(self.bottom)}
        self.edges = np.array([(ti[e.source], bi[e.target]) for e in graph.edges], dtype=np.int64).reshape(-1, 2)
        self.perms_top = list(itertools.permutations(range(len(self.top))))
        self.perms_bottom = np.array(list(itertools.permutations(range(len(self.bottom)))), dtype=np.int64)

    def table(self) -> np.ndarray:
        """crossings[i, j] for top permutation i and bottom permutation j."""
        nb = len(self.bottom)
        out = np.zeros((len(self.perms_top), len(self.perms_bottom)), dtype=np.int64)
        if len(self.edges) < 2 or nb == 0:
            return out
        # rank of bottom node in each bottom permutation
        rank_b = np.argsort(self.perms_bottom, axis=1)
        for i, p in enumerate(self.perms_top):
            rank_t = np.argsort(np.array(p))
            pt = rank_t[self.edges[:, 0]]
            pb = rank_b[:, self.edges[:, 1]]  # (perms, E)
            dt = np.sign(pt[:, None] - pt[None, :])  # (E, E)
            db = np.sign(pb[:, :, None] - pb[:, None, :])  # (perms, E, E)
            cross = (dt[None] * db) < 0
            out[i] = cross.sum(axis=(1, 2)) // 2
        return out

    def order_of(self, i: int, j: int) -> tuple[list[str], list[str]]:
        return [self.top[k] for k in self.perms_top[i]], [self.bottom[k] for k in self.perms_bottom[j]]

    def inversions(self, top: list[str], bottom: list[str]) -> int:
        return brute_inversions([self.mo[v] for v in top]) + brute_inversions([self.mo[v] for v in bottom])


def grouped_producers(direction: Direction = Direction.RIGHT) -> Graph:
    """Two producer groups l1*, l2* feeding shared consumers; l1 edges declared first.

    Each consumer x gets one edge from l1x and one from l2x, so the crossing
    optimum interleaves the groups.
    """
    consumers = ["dram", "cdn", "lb"]
    producers = [f"l1{c}" for c in "abc"] + [f"l2{c}" for c in "abc"]
    ids = producers + consumers
    nodes = tuple(Node(v, i) for i, v in enumerate(ids))
    edges = []
    for grp in ("l1", "l2"):
        for c, target in zip("abc", consumers):
            edges.append(Edge(f"{grp}{c}-{target}", f"{grp}{c}", target, len(edges)))
    return Graph(nodes, tuple(edges), direction)


def accumulator_graph(child_edge_order: list[int] | None = None, fixed: bool = True) -> Graph:
    """A compound reactor with ports x, y, z whose child wires them in varying order."""
    ports = tuple(Port(p, "Acc", model_order=i) for i, p in enumerate("xyz"))
    child_edges = [
        ("Acc", "x", "r1", None),
        ("r1", None, "r2", None),
        ("r2", None, "Acc", "z"),
        ("r1", None, "Acc", "y"),
    ]
    perm = child_edge_order or list(range(len(child_edges)))
    edges = tuple(
        Edge(f"c{k}", s, t, rank, source_port=sp, target_port=tp)
        for rank, k in enumerate(perm)
        for (s, sp, t, tp) in [child_edges[k]]
    )
    child = Graph((Node("r1", 0, kind="reaction"), Node("r2", 1, kind="reaction")), edges)
    nodes = (
        Node("timer", 0, kind="timer"),
        Node("Acc", 1, kind="reactor", children=child, fixed_port_order=fixed, ports=ports),
        Node("Out", 2, kind="reactor"),
    )
    top = (
        Edge("t0", "timer", "Acc", 0, target_port="x"),
        Edge("t1", "Acc", "Out", 1, source_port="y"),
        Edge("t2", "Acc", "Out", 2, source_port="z"),
    )
    return Graph(nodes, top)
