"""
oracle.py - Exhaustive shortest-composition search.

Breadth-first over known-parameter sets; only meant for tiny repositories
(finding the shortest composition is NP-hard).
"""

from collections import deque
from typing import Dict, FrozenSet, Optional, Tuple

from app.core.composition import Composition, Repository, Request
from app.core.params import ParameterId


def brute_force_shortest(repo: Repository, req: Request,
                         max_len: Optional[int] = None) -> Optional[Composition]:
    """Shortest valid composition with at most ``max_len`` calls, or None.

    A call that teaches nothing new never shortens a composition, so states
    only branch on services that extend the known set.
    """
    start: FrozenSet[ParameterId] = frozenset(req.init)
    if req.goal <= start:
        return Composition()
    limit = len(repo) if max_len is None else max_len

    services = sorted(repo.values(), key=lambda s: s.name)
    parent: Dict[FrozenSet[ParameterId], Tuple[Optional[FrozenSet[ParameterId]], str]] = {
        start: (None, "")
    }
    frontier = deque([(start, 0)])
    while frontier:
        known, depth = frontier.popleft()
        if depth >= limit:
            continue
        for svc in services:
            if not svc.inputs <= known or svc.outputs <= known:
                continue
            nxt = known | svc.outputs
            if nxt in parent:
                continue
            parent[nxt] = (known, svc.name)
            if req.goal <= nxt:
                return Composition.sequential(_unwind(parent, nxt))
            frontier.append((nxt, depth + 1))
    return None


def _unwind(parent, state) -> list:
    calls = []
    while True:
        prev, name = parent[state]
        if prev is None:
            break
        calls.append(name)
        state = prev
    calls.reverse()
    return calls
