from __future__ import annotations

import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from molayout.cycles import CycleBreakStrategy, break_cycles
from molayout.graph import Edge, Graph, Node
from molayout.layering import CycleError, assign_layers, fuse_dummies, insert_dummies
from support import random_graph


def _g(names: str, pairs: list[str]) -> Graph:
    nodes = tuple(Node(v, i) for i, v in enumerate(names))
    return Graph(nodes, tuple(Edge(p, p[0], p[1], k) for k, p in enumerate(pairs)))


def test_chain():
    assert assign_layers(_g("ABC", ["AB", "BC"])).layer_of == {"A": 0, "B": 1, "C": 2}


def test_diamond():
    lay = assign_layers(_g("ABCD", ["AB", "AC", "BD", "CD"]))
    assert lay.layer_of == {"A": 0, "B": 1, "C": 1, "D": 2}
    assert lay.layers == [["A"], ["B", "C"], ["D"]]


def test_isolated_node_stays_on_top():
    lay = assign_layers(_g("XABC", ["AB", "BC"]))
    assert lay.layer_of["X"] == 0


def test_pull_up_shortens_source_edge():
    # S only feeds D, which sits at layer 2; S moves down next to it
    lay = assign_layers(_g("ABDS", ["AB", "BD", "SD"]))
    assert lay.layer_of["S"] == 1


def test_cycle_is_rejected():
    with pytest.raises(CycleError):
        assign_layers(_g("AB", ["AB", "BA"]))


def test_pinned_layers():
    g = _g("IABO", ["IA", "AB", "BO", "IB"])
    g = Graph(g.nodes + (Node("X", 4),), g.edges)
    lay = assign_layers(g, frozenset({"I"}), frozenset({"O"}))
    assert lay.layers[0] == ["I"]
    assert lay.layers[-1] == ["O"]


def test_long_edge_gets_dummies():
    g = _g("ABCD", ["AB", "BC", "CD", "AD"])
    lay = assign_layers(g)
    g2, lay2 = insert_dummies(g, lay)
    assert lay2.dummy_chains["AD"] == ["AD~1", "AD~2"]
    assert [e.id for e in g2.edges if lay2.segment_owner[e.id] == "AD"] == ["AD#0", "AD#1", "AD#2"]
    assert lay2.segment_owner["AB"] == "AB"
    info = lay2.dummy_info["AD~1"]
    assert (info.edge_id, info.edge_order, info.source_order) == ("AD", 3, 0)


def test_reversed_long_edge_keeps_its_order():
    # a backward edge across several layers: every dummy carries the edge order
    g = _g("ABCDE", ["AB", "BC", "CD", "DE", "EB"])
    rs = break_cycles(g, CycleBreakStrategy.STRICT_MO)
    lay = assign_layers(rs.graph)
    g2, lay2 = insert_dummies(rs.graph, lay)
    chain = lay2.dummy_chains["EB"]
    assert len(chain) == lay.layer_of["E"] - lay.layer_of["B"] - 1 == 2
    assert {lay2.dummy_info[d].edge_order for d in chain} == {4}
    segs = [e for e in g2.edges if lay2.segment_owner[e.id] == "EB"]
    assert all(s.reversed for s in segs)


@given(st.integers(0, 100_000))
@settings(max_examples=100, deadline=None)
def test_layering_properties(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(1, 15), rng.randint(0, 30))
    acyclic = break_cycles(g, CycleBreakStrategy.GREEDY).graph
    lay = assign_layers(acyclic)
    for e in acyclic.edges:
        if not e.is_self_loop:
            assert lay.layer_of[e.head] >= lay.layer_of[e.tail] + 1

    ng = nx.DiGraph()
    ng.add_nodes_from(n.id for n in acyclic.nodes)
    ng.add_edges_from((e.tail, e.head) for e in acyclic.edges if not e.is_self_loop)
    assert lay.layer_count <= nx.dag_longest_path_length(ng) + 1

    g2, lay2 = insert_dummies(acyclic, lay)
    for e in g2.edges:
        assert lay2.layer_of[e.head] == lay2.layer_of[e.tail] + 1
    assert fuse_dummies(g2, lay2, acyclic) == acyclic
    assert sorted(v for layer in lay2.layers for v in layer) == sorted(lay2.layer_of)
