"""
oo_gen.py - Generator for object-oriented instances.

Random concept tree with typed properties, random services over partial
concepts, and a planted list whose inputs are rebuilt from what is known
when each member runs, including properties of generalizations.
"""

import logging
from typing import Dict, List, Optional, Set, Tuple

from app.genbench.config import GenConfig, GroundTruth, phase_rngs, pick, set_size
from app.genbench.name_gen import _labels

logger = logging.getLogger(__name__)

PHASES = ("tree", "properties", "services", "chain", "rewiring", "goal")


class _Tree:
    def __init__(self, parents: Dict[str, Optional[str]], definer: Dict[str, str]):
        self.parents = parents
        self.definer = definer

    def ancestors(self, concept: str) -> List[str]:
        chain = []
        node: Optional[str] = concept
        while node is not None:
            chain.append(node)
            node = self.parents[node]
        return chain

    def properties(self, concept: str) -> List[str]:
        line = set(self.ancestors(concept))
        return sorted(p for p, c in self.definer.items() if c in line)

    def merge(self, known: Dict[str, Set[str]], concept: str, props: List[str]) -> None:
        for anc in self.ancestors(concept):
            visible = set(self.properties(anc))
            known.setdefault(anc, set()).update(p for p in props if p in visible)


def _partial(rng, tree: _Tree, concepts: List[str], upper: int) -> Dict:
    concept = concepts[int(rng.integers(0, len(concepts)))]
    props = pick(rng, tree.properties(concept), int(rng.integers(0, upper + 1)))
    return {"concept": concept, "props": props}


def _from_known(rng, known: Dict[str, Set[str]], upper: int) -> Dict:
    concepts = sorted(known)
    concept = concepts[int(rng.integers(0, len(concepts)))]
    props = pick(rng, sorted(known[concept]), int(rng.integers(0, upper + 1)))
    return {"concept": concept, "props": props}


def generate_oo_instance(cfg: GenConfig) -> Tuple[Dict, GroundTruth]:
    rng = phase_rngs(cfg.seed, PHASES)
    concepts = _labels("C", cfg.concept_count)
    parents: Dict[str, Optional[str]] = {}
    for i, c in enumerate(concepts):
        parents[c] = concepts[int(rng["tree"].integers(0, i))] if i and rng["tree"].random() < 0.8 else None

    props = _labels("prop", cfg.property_count)
    definer = {p: concepts[int(rng["properties"].integers(0, len(concepts)))] for p in props}
    prop_type = {p: concepts[int(rng["properties"].integers(0, len(concepts)))] for p in props}
    tree = _Tree(parents, definer)

    upper = max(1, cfg.pars_per_service)
    names = _labels("ws", cfg.num_web_services)
    services: Dict[str, Dict[str, List[Dict]]] = {}
    for name in names:
        services[name] = {
            "in": [_partial(rng["services"], tree, concepts, 2) for _ in range(set_size(rng["services"], upper))],
            "out": [_partial(rng["services"], tree, concepts, 3) for _ in range(set_size(rng["services"], upper))],
        }
    init = [_partial(rng["services"], tree, concepts, 3) for _ in range(set_size(rng["services"], upper))]

    order = rng["chain"].permutation(len(names))
    chain = [names[i] for i in order[: cfg.num_ws_in_solution]]

    known: Dict[str, Set[str]] = {}
    for pc in init:
        tree.merge(known, pc["concept"], pc["props"])
    produced: List[Dict] = []
    for name in chain:
        services[name]["in"] = [_from_known(rng["rewiring"], known, 2) for _ in services[name]["in"]]
        for pc in services[name]["out"]:
            tree.merge(known, pc["concept"], pc["props"])
            produced.append(pc)

    required = [
        {"concept": pc["concept"], "props": pick(rng["goal"], pc["props"], int(rng["goal"].integers(0, len(pc["props"]) + 1)))}
        for pc in pick(rng["goal"], produced, set_size(rng["goal"], 3))
    ] or [_from_known(rng["goal"], known, 2)]

    instance = {
        "model": "oo",
        "conceptTree": {
            "concepts": [
                {
                    "name": c,
                    "parent": parents[c],
                    "props": [{"name": p, "type": prop_type[p]} for p in props if definer[p] == c],
                }
                for c in concepts
            ]
        },
        "services": [{"name": n, "in": services[n]["in"], "out": services[n]["out"]} for n in names],
        "query": {"known": init, "required": required},
    }
    logger.info(f"Generated oo instance: {len(concepts)} concepts, {len(props)} properties, "
                f"{len(names)} services, planted list of {len(chain)}")
    return instance, GroundTruth(model="oo", seed=cfg.seed, planted=chain)
