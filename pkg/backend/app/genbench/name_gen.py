"""
name_gen.py - Solution-based generator for name-matching instances.

A random repository is built first; then an ordered list of distinct
services gets its inputs redrawn from what the services before it (and the
user) provide, so the list is a valid composition by construction.
"""

import logging
from typing import Dict, List, Tuple

from app.core.composition import Request, Service, index_services
from app.core.loader import dump_name_instance
from app.genbench.config import GenConfig, GroundTruth, phase_rngs, pick, set_size

logger = logging.getLogger(__name__)

PHASES = ("services", "chain", "rewiring", "goal")


def _labels(prefix: str, count: int) -> List[str]:
    width = len(str(max(count - 1, 0)))
    return [f"{prefix}{i:0{width}d}" for i in range(count)]


def _disjoint_pick(rng, pool: List[str], avoid: List[str], upper: int) -> List[str]:
    """Random set of size [1, upper] drawn from ``pool`` without ``avoid``."""
    size = set_size(rng, upper)
    taken = set(avoid)
    drawn = pick(rng, pool, size + len(taken))
    return [p for p in drawn if p not in taken][:size]


def generate_name_instance(cfg: GenConfig) -> Tuple[Dict, GroundTruth]:
    rng = phase_rngs(cfg.seed, PHASES)
    params = _labels("p", cfg.num_parameters)
    names = _labels("ws", cfg.num_web_services)

    inputs: Dict[str, List[str]] = {}
    outputs: Dict[str, List[str]] = {}
    for name in names:
        outputs[name] = pick(rng["services"], params, set_size(rng["services"], cfg.pars_per_service))
        inputs[name] = _disjoint_pick(rng["services"], params, outputs[name], cfg.pars_per_service)
    init = pick(rng["services"], params, set_size(rng["services"], cfg.pars_per_service))

    order = rng["chain"].permutation(len(names))
    chain = [names[i] for i in order[: cfg.num_ws_in_solution]]

    known = set(init)
    for name in chain:
        redrawn = pick(rng["rewiring"], sorted(known), len(inputs[name]))
        inputs[name] = redrawn
        outputs[name] = [p for p in outputs[name] if p not in redrawn]
        known.update(outputs[name])

    pool = sorted(known - set(init)) or sorted(known)
    goal = pick(rng["goal"], pool, set_size(rng["goal"], cfg.pars_per_service))

    repo = index_services(Service.from_names(n, inputs[n], outputs[n]) for n in names)
    instance = dump_name_instance(repo, Request.from_names(init, goal))
    logger.info(f"Generated name instance: {len(names)} services, planted chain of {len(chain)}")
    return instance, GroundTruth(model="name", seed=cfg.seed, planted=chain)
