"""Decorated van Kampen diagrams, their auxiliary graph and rewriting."""

from __future__ import annotations

from .auxgraph import AuxGraph, DiagramStats, build_aux_graph, contiguity, diagram_stats, is_reduced
from .diagram import CONSTANT, FREE, RIGID, Cell, DecoratedDiagram, Part, Variable, cell_from_polygon
from .fulfill import count_fulfilling_tuples, fulfill_with_tuple, fulfilled_by_presentation
from .generate import circular_diagrams, random_diagram
from .rewrite import (
    eliminate_self_intersection,
    generally_reduce,
    has_self_intersection,
    is_generally_reduced,
    isolate_numbering,
    isolation_step,
    mine,
    standard_reduce,
)

__all__ = [
    "AuxGraph", "DiagramStats", "build_aux_graph", "contiguity", "diagram_stats", "is_reduced",
    "CONSTANT", "FREE", "RIGID", "Cell", "DecoratedDiagram", "Part", "Variable", "cell_from_polygon",
    "count_fulfilling_tuples", "fulfill_with_tuple", "fulfilled_by_presentation",
    "circular_diagrams", "random_diagram",
    "eliminate_self_intersection", "generally_reduce", "has_self_intersection", "is_generally_reduced",
    "isolate_numbering", "isolation_step", "mine", "standard_reduce",
]
