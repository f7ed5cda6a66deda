"""
search.py - Find-composition-and-learn over the live repository.

Same forward closure as the static name engine, but the ready service with
the smallest distance to the goal goes first (ties: registration order).
"""

import heapq
import logging
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Set

from app.core.composition import Request
from app.core.params import ParameterId
from app.engine_online.scores import compute_service_scores
from app.engine_online.state import OnlineState

logger = logging.getLogger(__name__)

UNSCORED = float("inf")


def remove_useless(state: OnlineState, request: Request, calls: List[str]) -> List[str]:
    """Backward pass keeping the first provider of every needed parameter."""
    first_provider: Dict[ParameterId, int] = {}
    for idx, name in enumerate(calls):
        for p in state.repository[name].outputs:
            if p not in request.init:
                first_provider.setdefault(p, idx)

    needed: Set[ParameterId] = set(request.goal - request.init)
    keep: List[bool] = [False] * len(calls)
    for idx in range(len(calls) - 1, -1, -1):
        svc = state.repository[calls[idx]]
        if any(first_provider.get(p) == idx for p in svc.outputs & needed):
            keep[idx] = True
            needed |= svc.inputs - request.init
    return [name for name, k in zip(calls, keep) if k]


def search(state: OnlineState, request: Request, exclude: Iterable[str] = ()) -> Optional[List[str]]:
    """Ordered service names answering ``request``, or None.

    Services in ``exclude`` are treated as absent.
    """
    excluded = set(exclude)
    repo = {n: s for n, s in state.repository.items() if n not in excluded}
    distance = compute_service_scores(request, repo)

    known: Set[ParameterId] = set(request.init)
    missing_goal = set(request.goal - known)
    unknown: Dict[str, int] = {}
    waiting: Dict[ParameterId, List[str]] = defaultdict(list)
    ready = []
    for name, svc in repo.items():
        missing = svc.inputs - known
        unknown[name] = len(missing)
        for p in missing:
            waiting[p].append(name)
        if not missing:
            ready.append((distance.get(name, UNSCORED), state.registered_at[name], name))
    heapq.heapify(ready)

    calls: List[str] = []
    while missing_goal:
        if not ready:
            return None
        _, _, name = heapq.heappop(ready)
        calls.append(name)
        for p in repo[name].outputs:
            if p in known:
                continue
            known.add(p)
            missing_goal.discard(p)
            for other in waiting.pop(p, ()):
                unknown[other] -= 1
                if unknown[other] == 0:
                    heapq.heappush(ready, (distance.get(other, UNSCORED), state.registered_at[other], other))
    return remove_useless(state, request, calls)

