"""
scores.py - Backward benefit scores for the name-model search.

A service's score cumulates the scores of its outputs; a parameter's score
cumulates an equal share of the score of every service it feeds. Propagation
is queue-driven from the goal and touches each service at most once.
"""

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Set

from app.core.composition import Service
from app.core.params import ParameterId

logger = logging.getLogger(__name__)

GOAL_SEED = 1.0


@dataclass
class ScoreTable:
    param_score: Dict[ParameterId, float] = field(default_factory=dict)
    service_score: Dict[str, float] = field(default_factory=dict)

    def service(self, name: str) -> float:
        return self.service_score.get(name, 0.0)

    def param(self, pid: ParameterId) -> float:
        return self.param_score.get(pid, 0.0)


def producers_index(services: Iterable[Service]) -> Dict[ParameterId, List[Service]]:
    producers: Dict[ParameterId, List[Service]] = defaultdict(list)
    for svc in sorted(services, key=lambda s: s.name):
        for p in svc.outputs:
            producers[p].append(svc)
    return producers


def compute_scores(services: Iterable[Service], goal: Iterable[ParameterId]) -> ScoreTable:
    """Score every service reachable backward from the goal.

    Args:
        services: repository contents (any iterable of Service)
        goal: required parameters, each seeded with GOAL_SEED

    Returns:
        ScoreTable; services never reached keep score 0.
    """
    services = list(services)
    producers = producers_index(services)
    param_score: Dict[ParameterId, float] = defaultdict(float)
    for p in goal:
        param_score[p] = GOAL_SEED

    queued: Set[str] = set()
    queue = deque()
    seeds = {svc.name: svc for p in goal for svc in producers.get(p, ())}
    for name in sorted(seeds):
        queued.add(name)
        queue.append(seeds[name])

    service_score: Dict[str, float] = {}
    processed: List[Service] = []
    while queue:
        svc = queue.popleft()
        score = sum(param_score.get(p, 0.0) for p in svc.outputs)
        service_score[svc.name] = score
        processed.append(svc)
        if not svc.inputs:
            continue
        share = score / len(svc.inputs)
        for p in sorted(svc.inputs):
            param_score[p] += share
            for producer in producers.get(p, ()):
                if producer.name not in queued:
                    queued.add(producer.name)
                    queue.append(producer)

    # Outputs may have gained score after their producer was processed.
    for svc in processed:
        service_score[svc.name] = sum(param_score.get(p, 0.0) for p in svc.outputs)

    logger.debug(f"Scored {len(processed)} of {len(services)} services")
    return ScoreTable(dict(param_score), service_score)
