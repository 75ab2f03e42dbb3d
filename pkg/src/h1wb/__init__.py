"""Workbench for height-1 conditions, polymorphism clones and graph gadgets."""

__version__ = "0.1.0"

from .conditions import H1Condition, Identity, Symbol, Term, is_trivial, sigma_of_graph, siggers, qnu  # noqa: E402
from .graphs import Graph, MarkedGraph, hom_search, glue, build_chain  # noqa: E402
from .clones import FiniteStructure, OperationTable, satisfies, find_siggers  # noqa: E402

__all__ = [
    "H1Condition", "Identity", "Symbol", "Term", "is_trivial", "sigma_of_graph", "siggers", "qnu",
    "Graph", "MarkedGraph", "hom_search", "glue", "build_chain",
    "FiniteStructure", "OperationTable", "satisfies", "find_siggers",
]
