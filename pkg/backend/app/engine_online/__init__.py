"""
engine_online - Compositions that survive services joining and leaving.

Public API:
    - OnlineState, Solution, Event, SearchStats: mutable engine state
    - FailoverManager: find / register / delete / drop with backups
    - compute_service_scores, search, remove_useless: search primitives
    - parse_stream, read_stream, replay_stream, write_events: JSON-lines driver
"""

from app.engine_online.failover import FailoverManager
from app.engine_online.scores import compute_service_scores
from app.engine_online.search import remove_useless, search
from app.engine_online.state import Event, OnlineState, SearchStats, Solution
from app.engine_online.stream import parse_stream, read_stream, replay_stream, write_events

__all__ = [
    "OnlineState",
    "Solution",
    "Event",
    "SearchStats",
    "FailoverManager",
    "compute_service_scores",
    "search",
    "remove_useless",
    "parse_stream",
    "read_stream",
    "replay_stream",
    "write_events",
]
