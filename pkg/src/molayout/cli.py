"""Command-line entry point.

Exit codes: 0 success, 1 bad input or usage, 2 internal invariant failure.
Outputs are rendered in memory first and written only when every step has
succeeded.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, TextIO

from .config import ConfigError, LayoutConfig
from .cycles import CycleBreakStrategy
from .dsl import DslSyntaxError, load_chart
from .geometry import LayoutResult
from .graph import Direction, Graph, InvalidGraphError, is_acyclic
from .json_graph import load_json_graph
from .metrics import stability_distance
from .ordering import CrossMin, DummyRule, PortPolicy
from .pipeline import PhaseTrace, layout
from .render import emit_layout_json, emit_svg

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


class UsageError(Exception):
    pass


class InternalError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(message)


def _bool(text: str) -> bool:
    low = text.lower()
    if low not in ("true", "false"):
        raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")
    return low == "true"


def _choices(enum) -> list[str]:
    return [m.value for m in enum]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="layout", description="Layered graph layout driven by model order.")
    p.add_argument("inputs", nargs="+", metavar="INPUT", help=".chart or .json graph file")
    p.add_argument("--cycle-breaking", choices=_choices(CycleBreakStrategy))
    p.add_argument("--crossing-min", choices=_choices(CrossMin))
    p.add_argument("--port-order", choices=_choices(PortPolicy), dest="port_policy")
    p.add_argument("--dummy-rule", choices=_choices(DummyRule))
    p.add_argument("--group-restricted", type=_bool, metavar="{true,false}")
    p.add_argument("--constrain-node-order", type=_bool, metavar="{true,false}")
    p.add_argument("--pinned-kinds", metavar="KIND[,KIND...]", help="node kinds kept in model order")
    p.add_argument("--direction", choices=_choices(Direction))
    p.add_argument("--node-spacing", type=float)
    p.add_argument("--layer-spacing", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--config", metavar="PATH", help="JSON config file; flags override it")
    p.add_argument("--svg", metavar="PATH")
    p.add_argument("--json", metavar="PATH", dest="json_out")
    p.add_argument("--metrics", action="store_true", help="print a metrics table")
    p.add_argument("--metrics-format", choices=["table", "json"], default="table")
    p.add_argument("--stability", action="store_true", help="compare the layouts of two inputs")
    p.add_argument("--explain", action="store_true", help="print the per-phase trace")
    p.add_argument("--strict-schema", action="store_true", help="reject unknown JSON fields")
    return p


_FLAG_KEYS = (
    "cycle_breaking",
    "crossing_min",
    "port_policy",
    "dummy_rule",
    "group_restricted",
    "constrain_node_order",
    "pinned_kinds",
    "direction",
    "node_spacing",
    "layer_spacing",
    "seed",
)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def profile_for(path: str) -> LayoutConfig:
    return LayoutConfig.statechart() if path.endswith(".chart") else LayoutConfig.dataflow()


def resolve_config(path: str, args: argparse.Namespace) -> LayoutConfig:
    config = profile_for(path)
    if args.config:
        config = LayoutConfig.from_json(_read(args.config), base=config)
    flags: dict[str, Any] = {k: getattr(args, k) for k in _FLAG_KEYS if getattr(args, k) is not None}
    return config.updated(flags)


def load_graph(path: str, strict_schema: bool, err: TextIO) -> Graph:
    text = _read(path)
    if path.endswith(".chart"):
        try:
            return load_chart(text)
        except DslSyntaxError as exc:
            raise UsageError(f"{path}:{exc}") from None
    loaded = load_json_graph(text, strict=strict_schema)
    for w in loaded.warnings:
        print(f"{path}: warning: {w}", file=err)
    return loaded.graph


@dataclass
class Run:
    path: str
    graph: Graph
    config: LayoutConfig
    result: LayoutResult
    trace: PhaseTrace


def _check(run: Run) -> None:
    """Post-conditions the pipeline must always meet."""

    def walk(trace: PhaseTrace, result: LayoutResult) -> None:
        if not is_acyclic(trace.reversal.graph):
            raise InternalError("cycle breaking left a cycle")
        horizontal = result.direction is Direction.DOWN
        for layer in trace.final.layers:
            real = [v for v in layer if v in result.nodes]
            coords = [result.nodes[v].center[0 if horizontal else 1] for v in real]
            if coords != sorted(coords):
                raise InternalError("placement does not preserve the in-layer order")
        for node_id, child in trace.children.items():
            box = result.nodes[node_id].children
            assert box is not None
            walk(child, box)

    walk(run.trace, run.result)


def _lay_out(path: str, args: argparse.Namespace, err: TextIO) -> Run:
    config = resolve_config(path, args)
    graph = load_graph(path, args.strict_schema, err)
    result, trace = layout(graph, config)
    run = Run(path, graph, config, result, trace)
    _check(run)
    return run


# --- explain --------------------------------------------------------------------


def _fmt_layers(layers: list[list[str]]) -> list[str]:
    return [f"  L{i}: " + (" ".join(layer) if layer else "-") for i, layer in enumerate(layers)]


def trace_text(run: Run) -> str:
    t, cfg = run.trace, run.config
    out: list[str] = []
    graph = t.reversal.graph
    out.append(f"== phase 1: cycle breaking ({cfg.cycle_breaking.value}) ==")
    rev = [e for e in graph.edges_by_order() if e.id in t.reversed_edges]
    out += [f"  reversed {e.id}: {e.source} -> {e.target}" for e in rev] or ["  reversed: none"]
    out.append(f"== phase 2: layer assignment ({t.layering.layer_count} layers) ==")
    out += _fmt_layers(t.layering.layers)
    out.append(f"== phase 3: pre-order ({cfg.crossing_min.value}) ==")
    out += _fmt_layers(t.preorder.layers)
    out.append("== phase 4: final order ==")
    out += _fmt_layers(t.final.layers)
    out.append("== phase 5: counts ==")
    m = t.metrics()
    out.append(f"  crossings: {m.crossings}")
    out.append(f"  backward edges: {m.backward_edges}")
    out.append(f"  node inversions: {m.node_inversions}")
    out.append(f"  edge inversions: {m.edge_inversions}")
    return "\n".join(out) + "\n"


def explain(argv: list[str]) -> str:
    """Phase trace for the first input; raises on bad input like :func:`run`."""
    args = build_parser().parse_args(argv)
    return trace_text(_lay_out(args.inputs[0], args, sys.stderr))


# --- run ------------------------------------------------------------------------


def _execute(args: argparse.Namespace, out: TextIO, err: TextIO) -> None:
    if args.stability and len(args.inputs) != 2:
        raise UsageError("--stability needs exactly two inputs")
    if not args.stability and len(args.inputs) != 1:
        raise UsageError("give one input (or two with --stability)")
    if (args.svg or args.json_out) and len(args.inputs) != 1:
        raise UsageError("--svg and --json take a single input")

    runs = [_lay_out(p, args, err) for p in args.inputs]

    files: dict[str, str] = {}
    if args.svg:
        files[args.svg] = emit_svg(runs[0].result)
    if args.json_out:
        files[args.json_out] = emit_layout_json(runs[0].result, runs[0].graph)

    text: list[str] = []
    if args.explain:
        for r in runs:
            if len(runs) > 1:
                text.append(f"# {r.path}\n")
            text.append(trace_text(r))
    if args.metrics or args.stability:
        report = runs[0].trace.metrics()
        if args.stability:
            s = stability_distance(runs[0].result, runs[1].result)
            if s is None:
                text.append("stability: no shared nodes\n")
            else:
                report.stability_distance = s.displacement
                report.order_flips = s.order_flips
        text.append(report.to_json() if args.metrics_format == "json" else report.table())

    for path, content in files.items():
        try:
            Path(path).write_text(content, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {path}: {exc}") from None
    out.write("".join(text))


def run(argv: list[str], out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        _execute(args, out, err)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (UsageError, ConfigError, InvalidGraphError) as exc:
        print(f"layout: error: {exc}", file=err)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - anything else is our bug
        print(f"layout: internal error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_INTERNAL
    return EXIT_OK


def main() -> None:
    sys.exit(run(sys.argv[1:]))
