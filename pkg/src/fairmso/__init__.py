"""Fair MSO1 vertex problems on graphs with a small cluster vertex deletion set."""
from .graph import Graph, ModulatedGraph, fair_cost, load_graph, validate_modulator

__version__ = "0.1.0"
__all__ = ["Graph", "ModulatedGraph", "fair_cost", "load_graph", "validate_modulator"]
