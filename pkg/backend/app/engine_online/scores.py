"""
scores.py - Distance-to-goal scores for the online search.

Services producing a goal parameter score 1, their input providers 2, and
so on backward. Lower is better; services never reached stay unscored.
"""

from collections import defaultdict, deque
from typing import Dict, List, Mapping

from app.core.composition import Request, Service


def compute_service_scores(request: Request, repo: Mapping[str, Service]) -> Dict[str, int]:
    producers: Dict[int, List[str]] = defaultdict(list)
    for svc in repo.values():
        for p in svc.outputs:
            producers[p].append(svc.name)

    distance: Dict[str, int] = {}
    queue = deque()
    for p in request.goal:
        for name in producers.get(p, ()):
            if name not in distance:
                distance[name] = 1
                queue.append(name)
    while queue:
        name = queue.popleft()
        for p in repo[name].inputs:
            for provider in producers.get(p, ()):
                if provider not in distance:
                    distance[provider] = distance[name] + 1
                    queue.append(provider)
    return distance
