"""Layered graph layout in which model order steers every phase."""

from .classification import OrderClass, OrderClassification
from .config import LayoutConfig
from .cycles import CycleBreakStrategy, ReversalSet, break_cycles
from .dsl import DslModel, DslSyntaxError, dsl_to_graph, load_chart, parse_dsl, print_dsl
from .geometry import LayoutResult
from .graph import Direction, Edge, Graph, Node, Port, PortOrigin, PortSide, validate
from .json_graph import JsonGraphError, parse_json_graph
from .layering import Layering, assign_layers, insert_dummies
from .metrics import MetricsReport, count_crossings, count_inversions, stability_distance
from .ordering import CrossMin, CrossMinStrategy, DummyRule, LayerOrders, PortPolicy, minimize_crossings
from .pipeline import PhaseTrace, layout
from .render import emit_layout_json, emit_svg

__version__ = "0.1.0"

__all__ = [
    "CrossMin",
    "CrossMinStrategy",
    "CycleBreakStrategy",
    "Direction",
    "DslModel",
    "DslSyntaxError",
    "DummyRule",
    "Edge",
    "Graph",
    "JsonGraphError",
    "LayerOrders",
    "Layering",
    "LayoutConfig",
    "LayoutResult",
    "MetricsReport",
    "Node",
    "OrderClass",
    "OrderClassification",
    "PhaseTrace",
    "Port",
    "PortOrigin",
    "PortPolicy",
    "PortSide",
    "ReversalSet",
    "assign_layers",
    "break_cycles",
    "count_crossings",
    "count_inversions",
    "dsl_to_graph",
    "emit_layout_json",
    "emit_svg",
    "insert_dummies",
    "layout",
    "load_chart",
    "minimize_crossings",
    "parse_dsl",
    "parse_json_graph",
    "print_dsl",
    "stability_distance",
    "validate",
]
