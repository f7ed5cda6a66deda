"""
flow_builder.py - Provider -> consumer graph of a composition.

Nodes are the calls plus two fictive endpoints (what the user knows and what
the user asks for); an edge carries the parameters one call hands to another.
"""

import logging
from typing import Callable, Dict, List, Optional

import networkx as nx

from app.core.composition import Composition, Repository, Request, layer_composition
from app.core.params import ParameterId, names_of
from app.taxonomy.model import Taxonomy

logger = logging.getLogger(__name__)

USER_INPUT = "userInput"
USER_GOAL = "userGoal"


def node_id(name: str) -> str:
    return (
        name
        .replace(".", "_")
        .replace("-", "_")
        .replace(" ", "_")
    )


def build_dependency_graph(repo: Repository, req: Request, comp: Composition,
                           tax: Optional[Taxonomy] = None) -> nx.DiGraph:
    """Each input is wired to the earliest call whose outputs cover it.

    Node attribute ``layer``: 0 for the user input, 1.. for calls (as-soon-as-
    possible layers when the composition is not layered), last+1 for the goal.
    Edge attribute ``params``: sorted parameter names.
    """
    if comp.layers is None:
        comp = layer_composition(repo, req, comp)
    covers: Callable[[ParameterId, ParameterId], bool] = (
        tax.subsumes if tax is not None else (lambda have, want: have == want)
    )

    graph = nx.DiGraph()
    graph.add_node(USER_INPUT, layer=0, label="user input")
    providers: List[tuple] = [(USER_INPUT, req.init)]

    def wire(consumer: str, wanted) -> None:
        handed: Dict[str, List[ParameterId]] = {}
        for p in wanted:
            source = next((name for name, outs in providers if any(covers(o, p) for o in outs)), None)
            if source is None:
                logger.warning(f"No provider for {consumer} input; composition is not valid")
                continue
            handed.setdefault(source, []).append(p)
        for source, params in handed.items():
            graph.add_edge(source, consumer, params=names_of(params))

    for depth, layer in enumerate(comp.layers, start=1):
        produced = []
        for name in layer:
            graph.add_node(name, layer=depth, label=name)
            wire(name, repo[name].inputs)
            produced.append((name, repo[name].outputs))
        # outputs of a layer become visible to the next one only
        providers.extend(produced)

    graph.add_node(USER_GOAL, layer=len(comp.layers) + 1, label="user goal")
    wire(USER_GOAL, req.goal)
    return graph


def graph_layers(graph: nx.DiGraph) -> List[List[str]]:
    depth = max((d for _, d in graph.nodes(data="layer")), default=-1)
    layers: List[List[str]] = [[] for _ in range(depth + 1)]
    for node, d in graph.nodes(data="layer"):
        layers[d].append(node)
    return layers
