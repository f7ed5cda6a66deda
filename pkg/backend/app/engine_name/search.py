"""
search.py - Composition search for the name-matching model.

Forward closure over accessible services: every parameter is learned once and
every service is unlocked once, so the loop costs O(|R| log |R| + P).
"""

import heapq
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from app.core.composition import Composition, Repository, Request, Service
from app.core.params import ParameterId
from app.engine_name.scores import ScoreTable, compute_scores

logger = logging.getLogger(__name__)


@dataclass
class SearchState:
    known: Set[ParameterId]
    input_parameter_of: Dict[ParameterId, List[Service]]
    unknown_input_parameters: Dict[str, int]
    accessible: List[Tuple[float, str]] = field(default_factory=list)
    user_unknown_parameters: Set[ParameterId] = field(default_factory=set)
    called: Set[str] = field(default_factory=set)

    @classmethod
    def start(cls, repo: Repository, req: Request, scores: ScoreTable) -> "SearchState":
        known = set(req.init)
        input_of: Dict[ParameterId, List[Service]] = defaultdict(list)
        unknown: Dict[str, int] = {}
        accessible: List[Tuple[float, str]] = []
        for svc in repo.values():
            missing = svc.inputs - known
            unknown[svc.name] = len(missing)
            for p in missing:
                input_of[p].append(svc)
            if not missing:
                accessible.append((-scores.service(svc.name), svc.name))
        heapq.heapify(accessible)
        return cls(
            known=known,
            input_parameter_of=input_of,
            unknown_input_parameters=unknown,
            accessible=accessible,
            user_unknown_parameters=set(req.goal - known),
        )

    def learn(self, svc: Service, scores: ScoreTable) -> None:
        for p in svc.outputs:
            if p in self.known:
                continue
            self.known.add(p)
            self.user_unknown_parameters.discard(p)
            for waiting in self.input_parameter_of.pop(p, ()):
                self.unknown_input_parameters[waiting.name] -= 1
                if self.unknown_input_parameters[waiting.name] == 0:
                    heapq.heappush(self.accessible, (-scores.service(waiting.name), waiting.name))


def find_composition(repo: Repository, req: Request, use_scores: bool = True,
                     scores: Optional[ScoreTable] = None) -> Optional[Composition]:
    """Greedy forward search.

    Picks the highest-scoring accessible service (ties by name) until the goal
    is known. With ``use_scores=False`` every service scores 0, so the pick is
    simply alphabetical.

    Returns:
        Composition, or None when the accessible set drains first.
    """
    if scores is None:
        scores = compute_scores(repo.values(), req.goal) if use_scores else ScoreTable()
    state = SearchState.start(repo, req, scores)
    calls: List[str] = []

    while state.user_unknown_parameters:
        if not state.accessible:
            logger.info(f"No accessible service left; {len(state.user_unknown_parameters)} goal parameters unknown")
            return None
        _, name = heapq.heappop(state.accessible)
        if name in state.called:
            continue
        state.called.add(name)
        calls.append(name)
        logger.debug(f"Picked {name}")
        state.learn(repo[name], scores)

    logger.info(f"Search finished with {len(calls)} calls")
    return Composition.sequential(calls)
