"""
hier_gen.py - Solution-based generator for hierarchical instances.

Samples a taxonomy of the configured shape, spreads instances over its
concepts, and rewires a planted chain so each input is an instance of a
generalization of something already known.
"""

import logging
from collections import defaultdict
from typing import Dict, List, Optional, Set, Tuple

from app.genbench.config import GenConfig, GroundTruth, phase_rngs, pick, set_size
from app.genbench.name_gen import _disjoint_pick, _labels

logger = logging.getLogger(__name__)

PHASES = ("taxonomy", "instances", "services", "chain", "rewiring", "goal")


def sample_taxonomy(rng, shape: str, size: int) -> Dict[str, Optional[str]]:
    """Concept -> parent for a flat, random or chain-shaped forest."""
    concepts = _labels("C", size)
    parents: Dict[str, Optional[str]] = {}
    for i, c in enumerate(concepts):
        if i == 0 or shape == "flat":
            parents[c] = None
        elif shape == "chain":
            parents[c] = concepts[i - 1]
        else:
            parents[c] = concepts[int(rng.integers(0, i))] if rng.random() < 0.8 else None
    return parents


def _ancestors(parents: Dict[str, Optional[str]], concept: str) -> List[str]:
    chain = []
    node: Optional[str] = concept
    while node is not None:
        chain.append(node)
        node = parents[node]
    return chain


def generate_hierarchical_instance(cfg: GenConfig) -> Tuple[Dict, GroundTruth]:
    rng = phase_rngs(cfg.seed, PHASES)
    parents = sample_taxonomy(rng["taxonomy"], cfg.taxonomy_shape, cfg.taxonomy_size)
    concepts = list(parents)

    total = max(cfg.num_parameters, len(concepts))
    instances = _labels("i", total)
    concept_of: Dict[str, str] = {}
    for idx, inst in enumerate(instances):
        # every concept gets at least one instance
        concept_of[inst] = concepts[idx] if idx < len(concepts) else concepts[int(rng["instances"].integers(0, len(concepts)))]
    by_concept: Dict[str, List[str]] = defaultdict(list)
    for inst in instances:
        by_concept[concept_of[inst]].append(inst)

    names = _labels("ws", cfg.num_web_services)
    inputs: Dict[str, List[str]] = {}
    outputs: Dict[str, List[str]] = {}
    for name in names:
        outputs[name] = pick(rng["services"], instances, set_size(rng["services"], cfg.pars_per_service))
        inputs[name] = _disjoint_pick(rng["services"], instances, outputs[name], cfg.pars_per_service)
    init = pick(rng["services"], instances, set_size(rng["services"], cfg.pars_per_service))

    order = rng["chain"].permutation(len(names))
    chain = [names[i] for i in order[: cfg.num_ws_in_solution]]

    reachable: Set[str] = set()

    def learn(batch: List[str]) -> None:
        for inst in batch:
            reachable.update(_ancestors(parents, concept_of[inst]))

    learn(init)
    for name in chain:
        pool = sorted(inst for c in reachable for inst in by_concept[c])
        redrawn = pick(rng["rewiring"], pool, len(inputs[name]))
        inputs[name] = redrawn
        outputs[name] = [p for p in outputs[name] if p not in redrawn]
        learn(outputs[name])

    given = set(init)
    pool = sorted(inst for c in reachable for inst in by_concept[c] if inst not in given)
    goal = pick(rng["goal"], pool, set_size(rng["goal"], cfg.pars_per_service))

    instance = {
        "model": "hierarchical",
        "taxonomy": {
            "concepts": [{"name": c, "parent": parents[c]} for c in concepts],
            "instances": [{"name": i, "concept": concept_of[i]} for i in instances],
        },
        "services": [{"name": n, "in": sorted(inputs[n]), "out": sorted(outputs[n])} for n in names],
        "query": {"known": sorted(init), "required": sorted(goal)},
    }
    logger.info(f"Generated hierarchical instance: {cfg.taxonomy_shape} taxonomy of {len(concepts)}, "
                f"{len(names)} services, planted chain of {len(chain)}")
    return instance, GroundTruth(model="hierarchical", seed=cfg.seed, planted=chain)
