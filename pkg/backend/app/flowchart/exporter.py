"""
exporter.py - Mermaid text for composition graphs, one subgraph per layer.
"""

from pathlib import Path
from typing import List, Union

import networkx as nx

from app.flowchart.flow_builder import graph_layers, node_id


def to_mermaid(graph: nx.DiGraph) -> str:
    lines: List[str] = ["graph LR"]
    layers = graph_layers(graph)
    last = len(layers) - 1
    for depth, nodes in enumerate(layers):
        if not nodes:
            continue
        title = "Input" if depth == 0 else "Goal" if depth == last else f"Layer {depth}"
        lines.append(f'subgraph L{depth}["{title}"]')
        for node in nodes:
            label = graph.nodes[node].get("label", node).replace('"', "'")
            lines.append(f'  {node_id(node)}["{label}"]')
        lines.append("end")

    for src, dst, params in graph.edges(data="params"):
        label = ", ".join(params or [])
        arrow = f"-->|{label}|" if label else "-->"
        lines.append(f"{node_id(src)} {arrow} {node_id(dst)}")
    return "\n".join(lines)


def export_mermaid(graph: nx.DiGraph, out_file: Union[str, Path] = "flowchart.md") -> None:
    with open(out_file, "w", encoding="utf-8") as f:
        f.write("```mermaid\n")
        f.write(to_mermaid(graph))
        f.write("\n```\n")
