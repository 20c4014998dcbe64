"""A minimal statechart language.

::

    chart Name {
      initial state Start
        -> Send [go]
        -> Receive
      state Send -> Join
      state Receive -> Join
      connector Join -> Done
      final state Done { state Inner }
    }

A state is ``[initial] [final] (state|connector) NAME``, optionally followed
by a braced body of nested states, then its outgoing transitions
``-> TARGET [guard]``. Transitions may only follow their source state.
Targets resolve within the enclosing body and may refer forward. ``//``
starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .graph import (
    Direction,
    Edge,
    Graph,
    Node,
    derive_global_edge_order,
    synthesize_implicit_ports,
)

CONNECTOR_SIZE = 12.0
CHAR_WIDTH = 8.0
STATE_HEIGHT = 30.0
MIN_STATE_WIDTH = 40.0

KEYWORDS = {"chart", "initial", "final", "state", "connector"}


class DslSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


@dataclass(frozen=True)
class DslTransition:
    target: str
    guard: str | None = None
    line: int = 0
    column: int = 0


@dataclass
class DslState:
    name: str
    initial: bool = False
    final: bool = False
    connector: bool = False
    body: DslModel | None = None
    transitions: list[DslTransition] = field(default_factory=list)
    line: int = 0
    column: int = 0


@dataclass
class DslModel:
    name: str
    states: list[DslState] = field(default_factory=list)
    line: int = 0
    column: int = 0

    def structure(self) -> tuple:
        """Position-free view used to compare models."""
        return (
            self.name,
            tuple(
                (
                    s.name,
                    s.initial,
                    s.final,
                    s.connector,
                    s.body.structure() if s.body is not None else None,
                    tuple((t.target, t.guard) for t in s.transitions),
                )
                for s in self.states
            ),
        )


# --- lexer ----------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<arrow>->)
  | (?P<lbrace>\{)
  | (?P<rbrace>\})
  | (?P<guard>\[[^\]\n]*\])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            ch = text[pos]
            if ch == "[":
                raise DslSyntaxError("unterminated guard, expected ']'", line, col)
            raise DslSyntaxError(f"unexpected character {ch!r}", line, col)
        kind = m.lastgroup
        assert kind is not None
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident" and m.group() in KEYWORDS:
            tokens.append(Token(m.group(), m.group(), line, col))
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# --- parser ---------------------------------------------------------------------


_DESCRIBE = {
    "eof": "end of input",
    "ident": "a name",
    "arrow": "'->'",
    "lbrace": "'{'",
    "rbrace": "'}'",
    "guard": "a guard",
}


def _describe(tok: Token) -> str:
    if tok.kind in KEYWORDS:
        return f"keyword '{tok.text}'"
    if tok.kind == "ident":
        return f"name '{tok.text}'"
    return _DESCRIBE.get(tok.kind, repr(tok.text))


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            raise DslSyntaxError(f"expected {what}, found {_describe(self.tok)}", self.tok.line, self.tok.column)
        return self.advance()

    def chart(self) -> DslModel:
        start = self.expect("chart", "keyword 'chart'")
        name = self.expect("ident", "chart name")
        self.expect("lbrace", "'{'")
        model = DslModel(name.text, self.body(), start.line, start.column)
        self.expect("rbrace", "'}' or a state declaration")
        self.expect("eof", "end of input")
        return model

    def body(self) -> list[DslState]:
        states: list[DslState] = []
        while True:
            t = self.tok
            if t.kind in ("initial", "final", "state", "connector"):
                states.append(self.state())
            elif t.kind == "ident" and self.peek().kind == "arrow":
                arrow = self.peek()
                raise DslSyntaxError(
                    "transition outside state: transitions must directly follow their source state",
                    arrow.line,
                    arrow.column,
                )
            elif t.kind == "arrow":
                raise DslSyntaxError("transition outside state", t.line, t.column)
            else:
                return states

    def state(self) -> DslState:
        first = self.tok
        initial = final = False
        while self.tok.kind in ("initial", "final"):
            flag = self.advance()
            if flag.kind == "initial":
                if initial:
                    raise DslSyntaxError("repeated 'initial'", flag.line, flag.column)
                initial = True
            else:
                if final:
                    raise DslSyntaxError("repeated 'final'", flag.line, flag.column)
                final = True
        if self.tok.kind not in ("state", "connector"):
            raise DslSyntaxError(
                f"expected 'state' or 'connector', found {_describe(self.tok)}", self.tok.line, self.tok.column
            )
        connector = self.advance().kind == "connector"
        name = self.expect("ident", "state name")
        st = DslState(name.text, initial, final, connector, line=first.line, column=first.column)
        if self.tok.kind == "lbrace":
            brace = self.advance()
            st.body = DslModel(name.text, self.body(), brace.line, brace.column)
            self.expect("rbrace", "'}' or a state declaration")
        while self.tok.kind == "arrow":
            self.advance()
            target = self.expect("ident", "transition target")
            guard = None
            if self.tok.kind == "guard":
                guard = self.advance().text[1:-1]
            # the target position is where resolution errors point
            st.transitions.append(DslTransition(target.text, guard, target.line, target.column))
        return st


def _resolve(model: DslModel) -> None:
    names: dict[str, DslState] = {}
    for s in model.states:
        if s.name in names:
            raise DslSyntaxError(f"duplicate state name {s.name!r}", s.line, s.column)
        names[s.name] = s
    for s in model.states:
        for t in s.transitions:
            if t.target not in names:
                raise DslSyntaxError(f"transition to undeclared state {t.target!r}", t.line, t.column)
        if s.body is not None:
            _resolve(s.body)


def parse_dsl(text: str) -> DslModel:
    """Parse chart text; every error carries a 1-based line and column."""
    model = _Parser(tokenize(text)).chart()
    _resolve(model)
    return model


# --- printer --------------------------------------------------------------------


def _print_states(states: list[DslState], indent: int, out: list[str]) -> None:
    pad = "  " * indent
    for s in states:
        words = (["initial"] if s.initial else []) + (["final"] if s.final else [])
        words += ["connector" if s.connector else "state", s.name]
        if s.body is not None:
            if s.body.states:
                out.append(pad + " ".join(words) + " {")
                _print_states(s.body.states, indent + 1, out)
                out.append(pad + "}")
            else:
                out.append(pad + " ".join(words) + " { }")
        else:
            out.append(pad + " ".join(words))
        for t in s.transitions:
            out.append(pad + f"  -> {t.target}" + (f" [{t.guard}]" if t.guard is not None else ""))


def print_dsl(model: DslModel) -> str:
    """Canonical text for a model; ``parse_dsl(print_dsl(m))`` reproduces ``m``."""
    out = [f"chart {model.name} {{"]
    _print_states(model.states, 1, out)
    out.append("}")
    return "\n".join(out) + "\n"


# --- graph ----------------------------------------------------------------------


def state_kind(s: DslState) -> str:
    if s.connector:
        return "connector"
    if s.initial:
        return "initial-state"
    if s.final:
        return "final-state"
    return "state"


def _state_size(s: DslState) -> tuple[float, float]:
    if s.connector:
        return CONNECTOR_SIZE, CONNECTOR_SIZE
    return max(MIN_STATE_WIDTH, CHAR_WIDTH * len(s.name) + 16.0), STATE_HEIGHT


def _model_graph(model: DslModel, direction: Direction) -> Graph:
    nodes: list[Node] = []
    edges: list[Edge] = []
    for i, s in enumerate(model.states):
        w, h = _state_size(s)
        children = _model_graph(s.body, direction) if s.body is not None else None
        nodes.append(Node(s.name, i, kind=state_kind(s), children=children, width=w, height=h))
        for k, t in enumerate(s.transitions):
            edges.append(Edge(f"{s.name}.t{k + 1}", s.name, t.target, priority_label=k + 1, local_index=k))
    graph = Graph(tuple(nodes), tuple(edges), direction)
    return synthesize_implicit_ports(derive_global_edge_order(graph))


def dsl_to_graph(model: DslModel, direction: Direction = Direction.DOWN) -> Graph:
    """Graph with node order = declaration order and edge order derived per state.

    Priority labels are the 1-based position of a transition under its state.
    Every edge endpoint gets an implicit port.
    """
    return _model_graph(model, direction)


def load_chart(text: str, direction: Direction = Direction.DOWN) -> Graph:
    return dsl_to_graph(parse_dsl(text), direction)
