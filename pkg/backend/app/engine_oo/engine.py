"""
engine.py - Property-learner composition search for the object-oriented model.

Learned properties climb the concept tree while each level gains something,
so every (concept, property) pair is learned and propagated exactly once.
"""

import heapq
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from app.core.composition import Composition
from app.engine_oo.tree import (
    GOAL_SERVICE, PRESENCE, ConceptTree, OOQuery, OOService,
)

logger = logging.getLogger(__name__)


@dataclass
class EngineState:
    known: Dict[str, Set[str]] = field(default_factory=lambda: defaultdict(set))
    required: Dict[str, Dict[str, List[str]]] = field(default_factory=lambda: defaultdict(lambda: defaultdict(list)))
    remaining: Dict[str, Dict[str, Set[str]]] = field(default_factory=dict)
    callable: Set[str] = field(default_factory=set)
    known_concepts: Set[str] = field(default_factory=set)
    queue: List[str] = field(default_factory=list)
    updates: int = 0

    def is_known(self, concept: str, prop: str) -> bool:
        return prop in self.known.get(concept, ())

    def _unlock(self, name: str) -> None:
        self.callable.add(name)
        if name != GOAL_SERVICE:
            heapq.heappush(self.queue, name)


def initialize(repo: Sequence[OOService], tree: ConceptTree, query: OOQuery) -> EngineState:
    """Index every input (concept, property) pair, Goal included."""
    state = EngineState()
    for svc in list(repo) + [query.goal_service()]:
        wanted: Dict[str, Set[str]] = defaultdict(set)
        for pc in svc.inputs:
            for concept, prop in pc.demands():
                wanted[concept].add(prop)
        state.remaining[svc.name] = dict(wanted)
        for concept, props in wanted.items():
            for prop in props:
                state.required[concept][prop].append(svc.name)
        if not wanted:
            state._unlock(svc.name)
    return state


def learn(state: EngineState, tree: ConceptTree, concept: str, prop: str) -> None:
    state.known[concept].add(prop)
    state.updates += 1
    if prop == PRESENCE:
        state.known_concepts.add(concept)
    for name in state.required.get(concept, {}).pop(prop, ()):
        left = state.remaining[name]
        left[concept].discard(prop)
        if not left[concept]:
            del left[concept]
        if not left:
            state._unlock(name)


def call_web_service(state: EngineState, ws: OOService, tree: ConceptTree) -> None:
    """Learn the outputs of ``ws`` and expand them to the generalizations."""
    for out in ws.outputs:
        props = set(out.props) | {PRESENCE}
        node: Optional[str] = out.concept
        while node is not None:
            gained = False
            for prop in props:
                if tree.has(node, prop) and not state.is_known(node, prop):
                    learn(state, tree, node, prop)
                    gained = True
            if not gained:
                break
            node = tree.parent[node]


def find_comp(repo: Sequence[OOService], tree: ConceptTree, query: OOQuery) -> Optional[Composition]:
    """Call Init, then any callable service (lexicographic) until Goal is callable."""
    services = {s.name: s for s in repo}
    state = initialize(repo, tree, query)
    call_web_service(state, query.init_service(), tree)

    calls: List[str] = []
    called: Set[str] = set()
    while GOAL_SERVICE not in state.callable:
        if not state.queue:
            logger.info(f"OO search stalled after {len(calls)} calls")
            return None
        name = heapq.heappop(state.queue)
        if name in called:
            continue
        called.add(name)
        calls.append(name)
        call_web_service(state, services[name], tree)
    logger.info(f"OO search finished with {len(calls)} calls, {state.updates} property updates")
    return Composition.sequential(calls)
