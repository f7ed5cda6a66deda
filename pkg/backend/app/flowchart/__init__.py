"""
Composition diagrams.

Public API:
- build_dependency_graph
- to_mermaid / export_mermaid
"""

from .flow_builder import USER_GOAL, USER_INPUT, build_dependency_graph, graph_layers, node_id
from .exporter import export_mermaid, to_mermaid

__all__ = [
    "USER_GOAL",
    "USER_INPUT",
    "build_dependency_graph",
    "graph_layers",
    "node_id",
    "export_mermaid",
    "to_mermaid",
]
