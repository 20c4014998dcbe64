from __future__ import annotations

import random
from dataclasses import replace

from hypothesis import given, settings
from hypothesis import strategies as st

from molayout.dsl import load_chart
from molayout.graph import (
    DanglingEndpoint,
    DuplicateNodeId,
    Edge,
    EdgeOrderNotDense,
    Graph,
    InvalidGraphError,
    Node,
    NodeOrderMismatch,
    Port,
    PortOrigin,
    derive_global_edge_order,
    is_acyclic,
    strip_implicit_ports,
    synthesize_implicit_ports,
    validate,
)
from support import SEND_RECEIVE, random_graph

import pytest


def test_validate_empty_graph():
    assert validate(Graph()) == []


def test_validate_duplicate_node_id():
    g = Graph((Node("A", 0), Node("A", 1)))
    assert validate(g) == [DuplicateNodeId("A")]


def test_validate_dangling_endpoint():
    e = Edge("e", "A", "Z", 0)
    assert validate(Graph((Node("A", 0),), (e,))) == [DanglingEndpoint("e", "Z")]


def test_validate_order_invariants():
    g = Graph((Node("A", 1), Node("B", 0)), (Edge("e", "A", "B", 3),))
    found = validate(g)
    assert NodeOrderMismatch("A", 0, 1) in found
    assert EdgeOrderNotDense((3,)) in found


def test_validate_child_may_reach_parent_ports():
    child = Graph((Node("r", 0),), (Edge("c", "P", "r", 0, source_port="p"),))
    parent = Node("P", 0, children=child, ports=(Port("p", "P"),))
    assert validate(Graph((parent,))) == []
    bad = Graph((Node("r", 0),), (Edge("c", "P", "r", 0, source_port="nope"),))
    assert validate(Graph((replace(parent, children=bad),))) != []


@given(st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_validate_is_pure_and_idempotent(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(0, 8), rng.randint(0, 12))
    if rng.random() < 0.5 and g.nodes:
        g = replace(g, nodes=g.nodes + (g.nodes[0],))
    first = validate(g)
    assert validate(g) == first


def test_derive_global_edge_order_basic():
    g = Graph(
        (Node("A", 0), Node("B", 1)),
        (
            Edge("e3", "B", "A", local_index=0),
            Edge("e2", "A", "B", local_index=1),
            Edge("e1", "A", "B", local_index=0),
        ),
    )
    out = {e.id: e.model_order for e in derive_global_edge_order(g).edges}
    assert out == {"e1": 0, "e2": 1, "e3": 2}


def test_derive_global_edge_order_self_loop():
    g = Graph((Node("A", 0),), (Edge("l", "A", "A", local_index=0),))
    assert derive_global_edge_order(g).edges[0].model_order == 0


def test_derive_global_edge_order_rejects_duplicate_local_index():
    g = Graph((Node("A", 0), Node("B", 1)), (Edge("x", "A", "B", local_index=0), Edge("y", "A", "B", local_index=0)))
    with pytest.raises(InvalidGraphError):
        derive_global_edge_order(g)


def test_initial_state_edges_come_first():
    g = load_chart(SEND_RECEIVE)
    first_two = sorted(g.edges, key=lambda e: e.model_order)[:2]
    assert {e.source for e in first_two} == {"Start"}


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_derived_order_is_lexicographic_permutation(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 8)
    nodes = tuple(Node(f"n{i}", i) for i in range(n))
    counts: dict[str, int] = {}
    edges = []
    for j in range(rng.randint(0, 15)):
        s = f"n{rng.randrange(n)}"
        edges.append(Edge(f"e{j}", s, f"n{rng.randrange(n)}", local_index=counts.get(s, 0)))
        counts[s] = counts.get(s, 0) + 1
    rng.shuffle(edges)
    out = derive_global_edge_order(Graph(nodes, tuple(edges)))
    assert sorted(e.model_order for e in out.edges) == list(range(len(edges)))
    by_order = sorted(out.edges, key=lambda e: e.model_order)
    keys = [(int(e.source[1:]), e.local_index) for e in by_order]
    assert keys == sorted(keys)


def test_synthesize_ports_on_bare_edge():
    g = synthesize_implicit_ports(Graph((Node("A", 0), Node("B", 1)), (Edge("e", "A", "B", 0),)))
    a, b = g.nodes
    assert [p.origin for p in a.ports] == [PortOrigin.IMPLICIT]
    assert [p.origin for p in b.ports] == [PortOrigin.IMPLICIT]
    assert g.edges[0].source_port == a.ports[0].id


def test_synthesize_only_missing_end():
    a = Node("A", 0, ports=(Port("out", "A"),))
    g = synthesize_implicit_ports(Graph((a, Node("B", 1)), (Edge("e", "A", "B", 0, source_port="out"),)))
    assert [p.id for p in g.nodes[0].ports] == ["out"]
    assert len(g.nodes[1].ports) == 1


def test_implicit_ports_follow_edge_order():
    g = Graph((Node("A", 0), Node("B", 1)), (Edge("e2", "A", "B", 1), Edge("e1", "A", "B", 0)))
    ports = synthesize_implicit_ports(g).nodes[0].ports
    assert [p.model_order for p in ports] == [0, 1]
    assert [p.id for p in ports] == ["e1.src", "e2.src"]


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_synthesis_adds_one_port_per_unported_end(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(1, 6), rng.randint(0, 10))
    out = synthesize_implicit_ports(g)
    assert len(out.edges) == len(g.edges)
    added = sum(len(n.ports) for n in out.nodes) - sum(len(n.ports) for n in g.nodes)
    assert added == 2 * len(g.edges)
    assert validate(out) == []
    assert strip_implicit_ports(out) == g


def test_is_acyclic():
    g = Graph((Node("A", 0), Node("B", 1)), (Edge("x", "A", "B", 0), Edge("y", "B", "A", 1)))
    assert not is_acyclic(g)
    assert is_acyclic(replace(g, edges=(g.edges[0], replace(g.edges[1], reversed=True))))
