"""
reduce.py - Backward usefulness sweep over (concept, property) demands.
"""

import logging
from typing import List, Sequence, Set, Tuple

from app.core.composition import Composition
from app.engine_oo.tree import PRESENCE, ConceptTree, OOQuery, OOService, PartialConcept

logger = logging.getLogger(__name__)

Demand = Tuple[str, str]


def supplies(outputs: Sequence[PartialConcept], demand: Demand, tree: ConceptTree) -> bool:
    concept, prop = demand
    for out in outputs:
        if not tree.is_a(out.concept, concept):
            continue
        if prop == PRESENCE or (prop in out.props and tree.has(concept, prop)):
            return True
    return False


def reduce_oo(repo: Sequence[OOService], tree: ConceptTree, query: OOQuery,
              comp: Composition) -> Composition:
    """Keep a call only if it supplies a demand no later kept call supplied.

    Demands already met by the query's known concepts are never raised.
    """
    services = {s.name: s for s in repo}

    def open_demands(partials: Sequence[PartialConcept]) -> Set[Demand]:
        return {d for pc in partials for d in pc.demands() if not supplies(query.known, d, tree)}

    needed = open_demands(query.required)
    kept: List[str] = []
    for name in reversed(comp.calls):
        svc = services[name]
        met = {d for d in needed if supplies(svc.outputs, d, tree)}
        if not met:
            continue
        kept.append(name)
        needed = (needed - met) | open_demands(svc.inputs)
    kept.reverse()
    if len(kept) < len(comp):
        logger.info(f"OO reduction removed {len(comp) - len(kept)} services")
    return Composition.sequential(kept)
