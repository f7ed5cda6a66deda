"""
state.py - Mutable online state: repository, requests, solutions, usages.
"""

import itertools
import logging
import threading
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set

from app.core.composition import Request, Service
from app.core.params import ParameterId

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class Solution:
    """A composition kept alive for a query; identity-hashed."""
    query_id: str
    request: Request
    main: List[str]
    backup: Dict[str, Optional["Solution"]] = field(default_factory=dict)
    parent: Optional["Solution"] = None
    replaces: Optional[str] = None  # main service of the parent this backup stands in for
    kind: Optional[int] = None  # 1: replaces one service, 2: replaces the whole suffix
    active: bool = True

    @property
    def is_backup(self) -> bool:
        return self.parent is not None


@dataclass
class SearchStats:
    main_searches: int = 0
    backup_searches: int = 0


@dataclass
class Event:
    event: str
    id: str
    calls: List[str] = field(default_factory=list)
    service: Optional[str] = None

    def to_json(self) -> Dict:
        data = {"event": self.event, "id": self.id, "calls": list(self.calls)}
        if self.service is not None:
            data["service"] = self.service
        return data


class OnlineState:
    """Single logical writer; every mutating operation takes ``lock``."""

    def __init__(self, reoptimize: bool = False):
        self.repository: Dict[str, Service] = {}
        self.registered_at: Dict[str, int] = {}
        self.input_for: Dict[ParameterId, Set[str]] = defaultdict(set)
        self.requests: Dict[str, Request] = {}
        self.compositions: Dict[str, Optional[Solution]] = {}
        self.usages: Dict[str, Set[Solution]] = defaultdict(set)
        self.stats = SearchStats()
        self.reoptimize = reoptimize
        self.lock = threading.RLock()
        self._ticket = itertools.count()

    def add_service(self, svc: Service) -> None:
        self.repository[svc.name] = svc
        self.registered_at[svc.name] = next(self._ticket)
        for p in svc.inputs:
            self.input_for[p].add(svc.name)

    def remove_service(self, name: str) -> Service:
        svc = self.repository.pop(name)
        for p in svc.inputs:
            users = self.input_for.get(p)
            if users is not None:
                users.discard(name)
                if not users:
                    del self.input_for[p]
        return svc

    def register_usages(self, sol: Solution) -> None:
        for name in sol.main:
            self.usages[name].add(sol)

    def retire(self, sol: Solution) -> None:
        """Deactivate a solution and every backup hanging below it."""
        sol.active = False
        for name in sol.main:
            users = self.usages.get(name)
            if users is not None:
                users.discard(sol)
                if not users:
                    del self.usages[name]
        for bkp in sol.backup.values():
            if bkp is not None and bkp.active:
                self.retire(bkp)

    def expected_usages(self) -> Dict[str, Set[Solution]]:
        """Usages rebuilt from scratch from every live solution tree."""
        expected: Dict[str, Set[Solution]] = defaultdict(set)

        def walk(sol: Solution) -> None:
            for name in sol.main:
                expected[name].add(sol)
            for bkp in sol.backup.values():
                if bkp is not None:
                    walk(bkp)

        for sol in self.compositions.values():
            if sol is not None:
                walk(sol)
        return {k: v for k, v in expected.items() if v}

    def live_usages(self) -> Dict[str, Set[Solution]]:
        return {k: set(v) for k, v in self.usages.items() if v}
