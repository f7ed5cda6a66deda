"""
failover.py - Query solutions with precomputed backups, and the repository
operations that keep them valid.

Every main service of a solution gets a backup: first a composition that
stands in for that one service (type 1), else one regenerating the whole
suffix from the surviving prefix (type 2).
"""

import logging
from concurrent.futures import Future, ThreadPoolExecutor
from typing import Dict, List, Optional

from app.core.composition import Request, Service
from app.core.errors import DuplicateServiceError, InstanceError, UnknownQueryError, UnknownServiceError
from app.engine_online.search import remove_useless, search
from app.engine_online.state import Event, OnlineState, Solution

logger = logging.getLogger(__name__)


class FailoverManager:
    """Online operations over one OnlineState.

    With ``async_backups`` the per-service backups of a new solution are
    computed on a worker thread; a delete that arrives first simply finds no
    backup and re-solves.
    """

    def __init__(self, state: Optional[OnlineState] = None, async_backups: bool = False):
        self.state = state or OnlineState()
        self.async_backups = async_backups
        self._executor: Optional[ThreadPoolExecutor] = (
            ThreadPoolExecutor(max_workers=1, thread_name_prefix="backup") if async_backups else None
        )
        self._pending: List[Future] = []

    # ============================================================
    # Solutions and backups
    # ============================================================

    def find_composition_online(self, query_id: str, request: Request) -> Optional[Solution]:
        """Main search; the solution's services are recorded in usages."""
        st = self.state
        st.stats.main_searches += 1
        calls = search(st, request)
        if calls is None:
            return None
        sol = Solution(query_id, request, calls)
        st.register_usages(sol)
        return sol

    def find_backup(self, sol: Solution, service: str) -> Optional[Solution]:
        st = self.state
        pos = sol.main.index(service)
        prefix, suffix = sol.main[:pos], sol.main[pos + 1:]
        request = sol.request

        known = set(request.init)
        for name in prefix:
            known |= st.repository[name].outputs
        required = set(request.goal)
        for name in reversed(suffix):
            svc = st.repository[name]
            required -= svc.outputs
            required |= svc.inputs

        st.stats.backup_searches += 1
        part = search(st, Request(frozenset(known), frozenset(required - known)), exclude=[service])
        kind = 1
        if part is not None:
            stitched = prefix + part + suffix
        else:
            st.stats.backup_searches += 1
            part = search(st, Request(frozenset(known), frozenset(request.goal - known)), exclude=[service])
            if part is None:
                return None
            kind = 2
            stitched = prefix + part

        ordered = list(dict.fromkeys(stitched))
        backup = Solution(sol.query_id, request, remove_useless(st, request, ordered),
                          parent=sol, replaces=service, kind=kind)
        st.register_usages(backup)
        logger.debug(f"Backup for {service} in {sol.query_id}: type {kind}, {backup.main}")
        return backup

    def _fill_backups(self, sol: Solution) -> None:
        with self.state.lock:
            if not sol.active:
                return
            for name in sol.main:
                if name not in sol.backup and name in self.state.repository:
                    sol.backup[name] = self.find_backup(sol, name)

    def compute_backups(self, sol: Solution) -> None:
        if self._executor is None:
            self._fill_backups(sol)
        else:
            self._pending.append(self._executor.submit(self._fill_backups, sol))

    def backup_composition(self, query_id: str, request: Request) -> Optional[Solution]:
        sol = self.find_composition_online(query_id, request)
        if sol is not None:
            self.compute_backups(sol)
        return sol

    def wait(self) -> None:
        """Block until every queued backup computation has finished."""
        while self._pending:
            self._pending.pop(0).result()

    def close(self) -> None:
        self.wait()
        if self._executor is not None:
            self._executor.shutdown(wait=True)

    # ============================================================
    # Operations
    # ============================================================

    def find_request(self, query_id: str, request: Request) -> Event:
        """Register a query (replacing one with the same id) and solve it."""
        with self.state.lock:
            if query_id in self.state.requests:
                self.drop_composition_request(query_id)
            self.state.requests[query_id] = request
            sol = self.backup_composition(query_id, request)
            self.state.compositions[query_id] = sol
            if sol is None:
                return Event("unsolvable", query_id)
            return Event("solved", query_id, list(sol.main))

    def drop_composition_request(self, query_id: str) -> None:
        with self.state.lock:
            if query_id not in self.state.requests:
                raise UnknownQueryError(query_id)
            sol = self.state.compositions.pop(query_id, None)
            if sol is not None:
                self.state.retire(sol)
            del self.state.requests[query_id]

    def register_service(self, svc: Service) -> List[Event]:
        st = self.state
        with st.lock:
            if svc.name in st.repository:
                raise DuplicateServiceError(f"Service already registered: {svc.name}")
            st.add_service(svc)
            events: List[Event] = []
            for qid in sorted(st.requests):
                current = st.compositions.get(qid)
                if current is None:
                    sol = self.backup_composition(qid, st.requests[qid])
                    if sol is not None:
                        st.compositions[qid] = sol
                        events.append(Event("solved", qid, list(sol.main)))
                elif st.reoptimize:
                    st.stats.main_searches += 1
                    calls = search(st, st.requests[qid])
                    if calls is not None and len(calls) < len(current.main):
                        st.retire(current)
                        sol = Solution(qid, st.requests[qid], calls)
                        st.register_usages(sol)
                        self.compute_backups(sol)
                        st.compositions[qid] = sol
                        events.append(Event("reoptimized", qid, list(calls)))
            return events

    def delete_service(self, name: str) -> List[Event]:
        """Remove a service and repair every solution that used it."""
        st = self.state
        with st.lock:
            if name not in st.repository:
                raise UnknownServiceError(name)
            st.remove_service(name)
            affected = st.usages.pop(name, set())
            events: List[Event] = []

            for sol in sorted((s for s in affected if not s.is_backup), key=lambda s: s.query_id):
                if not sol.active:
                    continue
                qid = sol.query_id
                bkp = sol.backup.pop(name, None)
                if bkp is not None and bkp.active:
                    st.retire(sol)
                    bkp.parent, bkp.replaces, bkp.kind = None, None, None
                    bkp.backup = {}
                    st.compositions[qid] = bkp
                    self.compute_backups(bkp)
                    logger.info(f"{qid}: {name} removed, swapped to backup {bkp.main}")
                    events.append(Event("swapped_to_backup", qid, list(bkp.main)))
                    continue
                st.retire(sol)
                fresh = self.backup_composition(qid, sol.request)
                st.compositions[qid] = fresh
                if fresh is None:
                    logger.info(f"{qid}: {name} removed, no alternative composition")
                    events.append(Event("request_lost", qid))
                else:
                    events.append(Event("resolved_from_scratch", qid, list(fresh.main)))

            backups = [s for s in affected if s.is_backup and s.active]
            for sol in sorted(backups, key=lambda s: (s.query_id, s.replaces or "")):
                if not sol.active:
                    continue
                parent, key = sol.parent, sol.replaces
                st.retire(sol)
                replacement = self.find_backup(parent, key) if key in st.repository else None
                parent.backup[key] = replacement
                events.append(Event("backup_recomputed", sol.query_id,
                                    list(replacement.main) if replacement else [], service=key))
            return events

    detect_service_down = delete_service
