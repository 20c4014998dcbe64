from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from molayout.dsl import (
    KEYWORDS,
    DslModel,
    DslState,
    DslSyntaxError,
    DslTransition,
    dsl_to_graph,
    load_chart,
    parse_dsl,
    print_dsl,
    tokenize,
)
from molayout.graph import Direction, PortOrigin
from support import SEND_RECEIVE


def test_tokenize_positions():
    toks = tokenize("chart X {\n  state A -> B [g]\n}")
    assert [(t.kind, t.line, t.column) for t in toks] == [
        ("chart", 1, 1),
        ("ident", 1, 7),
        ("lbrace", 1, 9),
        ("state", 2, 3),
        ("ident", 2, 9),
        ("arrow", 2, 11),
        ("ident", 2, 14),
        ("guard", 2, 16),
        ("rbrace", 3, 1),
        ("eof", 3, 2),
    ]


def test_parse_send_receive():
    m = parse_dsl(SEND_RECEIVE)
    assert m.name == "ABRO"
    assert [s.name for s in m.states] == ["Start", "Send", "Receive", "Join", "Done"]
    start = m.states[0]
    assert start.initial and not start.final
    assert [(t.target, t.guard) for t in start.transitions] == [("Send", "go"), ("Receive", None)]
    assert m.states[3].connector


def test_graph_orders_and_priorities():
    g = load_chart(SEND_RECEIVE)
    assert g.direction is Direction.DOWN
    assert [n.id for n in g.nodes] == ["Start", "Send", "Receive", "Join", "Done"]
    assert [n.model_order for n in g.nodes] == list(range(5))
    edges = g.edges_by_order()
    assert [e.id for e in edges] == ["Start.t1", "Start.t2", "Send.t1", "Receive.t1", "Join.t1", "Done.t1"]
    assert [e.priority_label for e in edges] == [1, 2, 1, 1, 1, 1]
    kinds = {n.id: n.kind for n in g.nodes}
    assert kinds["Start"] == "initial-state" and kinds["Join"] == "connector" and kinds["Send"] == "state"
    for e in g.edges:
        assert e.source_port and e.target_port
    assert all(p.origin is PortOrigin.IMPLICIT for n in g.nodes for p in n.ports)


def test_nested_states_become_children():
    text = "chart N {\n  state Outer {\n    initial state In1 -> In2\n    final state In2\n  } -> Last\n  state Last\n}\n"
    g = load_chart(text)
    outer = g.node("Outer")
    assert outer.children is not None
    assert [n.id for n in outer.children.nodes] == ["In1", "In2"]
    assert [e.id for e in outer.children.edges] == ["In1.t1"]
    assert [e.id for e in g.edges] == ["Outer.t1"]
    assert outer.children.node("In2").kind == "final-state"


def test_forward_references_and_comments():
    text = "// header\nchart F {\n  state A -> C // later\n  // state Ghost -> A\n  state C\n}\n"
    g = load_chart(text)
    assert [n.id for n in g.nodes] == ["A", "C"]


def test_guard_keeps_inner_text():
    m = parse_dsl("chart G { state A -> A [x > 1 && !ok] }")
    assert m.states[0].transitions[0].guard == "x > 1 && !ok"


@pytest.mark.parametrize(
    "text, pos",
    [
        ("chart", (1, 6)),
        ("chart M {\n  state\n}", (3, 1)),
        ("chart M { state A -> A [x }", (1, 24)),
        ("chart M { state A state A }", (1, 19)),
        ("chart M { final final state A }", (1, 17)),
        ("chart M { initial A }", (1, 19)),
        ("chart M { state A { state B } -> B }", (1, 34)),
        ("chart M { state A } }", (1, 21)),
    ],
)
def test_syntax_error_positions(text, pos):
    with pytest.raises(DslSyntaxError) as info:
        parse_dsl(text)
    assert (info.value.line, info.value.column) == pos
    assert str(info.value).startswith(f"{pos[0]}:{pos[1]}: ")


def test_stray_transition_message():
    with pytest.raises(DslSyntaxError, match="transition outside state"):
        parse_dsl("chart M { state A state B A -> B }")


def test_printer_canonical_form():
    m = parse_dsl("chart  P{initial state A->B[go] state B{ } }")
    assert print_dsl(m) == "chart P {\n  initial state A\n    -> B [go]\n  state B { }\n}\n"


def test_sizes():
    g = load_chart("chart S { state A connector J state LongerName }")
    assert (g.node("J").width, g.node("J").height) == (12.0, 12.0)
    assert g.node("A").width == 40.0
    assert g.node("LongerName").width == 8 * 10 + 16


# --- round trip -----------------------------------------------------------------

_name = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,6}", fullmatch=True).filter(lambda s: s not in KEYWORDS)
_guard = st.none() | st.text(st.characters(blacklist_characters="]\n\r", blacklist_categories=("Cs",)), max_size=8)


@st.composite
def _models(draw, depth: int = 0, name: str = "M") -> DslModel:
    names = draw(st.lists(_name, min_size=0 if depth else 1, max_size=4, unique=True))
    states = []
    for n in names:
        body = draw(st.none() | _models(depth + 1, n)) if depth < 2 else None
        transitions = [
            DslTransition(t, g) for t, g in draw(st.lists(st.tuples(st.sampled_from(names), _guard), max_size=3))
        ]
        flags = draw(st.tuples(st.booleans(), st.booleans(), st.booleans()))
        states.append(DslState(n, flags[0], flags[1], flags[2], body, transitions))
    return DslModel(name, states)


@given(_models())
@settings(max_examples=150, deadline=None)
def test_print_parse_round_trip(model):
    text = print_dsl(model)
    again = parse_dsl(text)
    assert again.structure() == model.structure()
    assert print_dsl(again) == text


@given(_models())
@settings(max_examples=50, deadline=None)
def test_graph_from_model_is_deterministic(model):
    assert dsl_to_graph(model) == dsl_to_graph(parse_dsl(print_dsl(model)))
