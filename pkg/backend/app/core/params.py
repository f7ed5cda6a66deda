"""
params.py - Parameter interning.

Parameter names are mapped to dense integers in first-seen order so every
set operation in the engines works over small ints.
"""

import threading
from typing import Dict, Iterable, FrozenSet, List

ParameterId = int


class ParameterRegistry:
    """Thread-safe, append-only name <-> id table."""

    def __init__(self):
        self._ids: Dict[str, ParameterId] = {}
        self._names: List[str] = []
        self._lock = threading.Lock()

    def intern(self, name: str) -> ParameterId:
        if not isinstance(name, str) or not name:
            raise ValueError("Parameter name must be a non-empty string")
        # Fast path without the lock; dict reads are atomic.
        pid = self._ids.get(name)
        if pid is not None:
            return pid
        with self._lock:
            pid = self._ids.get(name)
            if pid is None:
                pid = len(self._names)
                self._names.append(name)
                self._ids[name] = pid
            return pid

    def name_of(self, pid: ParameterId) -> str:
        return self._names[pid]

    def __len__(self) -> int:
        return len(self._names)


_registry = ParameterRegistry()


def intern(name: str) -> ParameterId:
    """Return the stable id of ``name`` for this process."""
    return _registry.intern(name)


def intern_all(names: Iterable[str]) -> FrozenSet[ParameterId]:
    return frozenset(_registry.intern(n) for n in names)


def name_of(pid: ParameterId) -> str:
    return _registry.name_of(pid)


def names_of(pids: Iterable[ParameterId]) -> List[str]:
    """Names sorted alphabetically, for stable output."""
    return sorted(_registry.name_of(p) for p in pids)
